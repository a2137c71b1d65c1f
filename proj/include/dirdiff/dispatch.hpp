#pragma once

#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dirdiff/config.hpp"
#include "dirdiff/experiments.hpp"

namespace dirdiff {

inline LevelSetSetup level_set_setup(const RunConfig& c) {
  LevelSetSetup s;
  s.T = c.T;
  s.window = GridSpec::ball_window(static_cast<std::size_t>(c.dimension), c.grid_radius, c.grid_resolution);
  s.levels = c.maximal_levels;
  s.quad = c.quad;
  s.solver = c.solver;
  return s;
}

/// s values drawn uniformly from [-T/2, T/2].
inline std::vector<double> sampled_shifts(double T, int count, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x5));
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(uniform(rng, -0.5 * T, 0.5 * T));
  return out;
}

inline std::vector<PointN> sampled_points(std::size_t n, int count, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x9));
  std::vector<PointN> out;
  const Box box = Box::cube(n, -2.0, 2.0);
  for (int i = 0; i < count; ++i) out.push_back(uniform_point(rng, box));
  return out;
}

/// Runs the configured command; one report per (field, scalar) pairing where
/// the command takes them.
inline std::vector<ExperimentReport> run_command(const RunConfig& c, std::ostream& log = std::clog) {
  const Parallel par{c.jobs};
  const auto fields = resolve_fields(c);
  const auto scalars = resolve_scalars(c.scalars, c.dimension);
  const auto n = static_cast<std::size_t>(c.dimension);
  std::vector<ExperimentReport> out;
  auto stage = [&](const std::string& what) { log << "[" << c.command << "] " << what << '\n'; };

  if (c.command == "invert-check") {
    stage("round-trip suite");
    out.push_back(run_invert_check(fields, c.invert_q, static_cast<std::size_t>(c.points), c.solver, c.seed));
  } else if (c.command == "distortion") {
    stage("distortion sweep");
    out.push_back(run_distortion(fields, c.T, static_cast<std::size_t>(c.rects), c.grid_resolution, c.solver, c.seed,
                                 par));
  } else if (c.command == "covering-demo") {
    out.push_back(run_covering_demo(IntervalCollection{c.intervals}, c.c));
  } else if (c.command == "h-n-decay" || c.command == "c-alpha") {
    const auto catalog = resolve_catalog(c);
    const auto setup = level_set_setup(c);
    for (const auto& v : fields) {
      if (c.command == "h-n-decay") {
        stage(describe(v));
        std::vector<double> ns;
        for (int k = 1; k <= c.n_max; ++k) ns.push_back(k);
        out.push_back(run_h_n_decay(catalog, v, setup, c.s_values, ns, c.alphas, par));
      } else {
        for (double a : c.alphas) {
          stage(describe(v) + " alpha=" + format_real(a));
          out.push_back(run_c_alpha(catalog, v, setup, c.s_values, a, c.n_max, c.rate_lambdas, par));
        }
      }
    }
  } else {
    for (const auto& v : fields) {
      for (const auto& f : scalars) {
        stage(describe(v) + " / " + describe(f));
        if (c.command == "norm-convergence") {
          NormConvergenceSetup s;
          s.p = c.p;
          s.t_values = c.t_values;
          s.grid = GridSpec{Box::cube(n, -c.grid_radius, c.grid_radius), c.grid_resolution, std::nullopt};
          s.quad = c.quad;
          s.error_floor = c.error_floor;
          out.push_back(run_norm_convergence(f, v, s, par));
        } else if (c.command == "weak-type") {
          out.push_back(run_weak_type(f, v, level_set_setup(c), c.lambdas, SGrid{c.T, c.s_count}, par));
        } else if (c.command == "pointwise") {
          PointwiseSetup s;
          s.T = c.T;
          s.t_values = c.pointwise_t;
          s.quad = c.quad;
          s.solver = c.solver;
          out.push_back(run_pointwise(f, v, s, sampled_shifts(c.T, c.s_samples, c.seed),
                                      sampled_points(n, c.points, c.seed)));
        } else if (c.command == "continuity") {
          double lambda = 0.0;
          if (c.continuity_lambda) {
            lambda = *c.continuity_lambda;
          } else if (auto sup = f.sup_abs()) {
            lambda = 0.5 * *sup;
          } else {
            throw std::invalid_argument("continuity.lambda required: " + describe(f) + " declares no sup");
          }
          out.push_back(run_continuity_in_s(f, v, level_set_setup(c), lambda, SGrid{c.T, c.s_count}, par));
        } else {
          throw std::invalid_argument("unknown command '" + c.command + "'");
        }
      }
    }
  }
  return out;
}

inline nlohmann::json report_document(const RunConfig& c, const std::vector<ExperimentReport>& reports) {
  nlohmann::json doc;
  doc["command"] = c.command;
  doc["config"] = config_map(c);
  auto rs = nlohmann::json::array();
  bool passed = true;
  for (const auto& r : reports) {
    rs.push_back(to_json(r));
    passed = passed && r.passed();
  }
  doc["reports"] = std::move(rs);
  doc["passed"] = passed;
  return doc;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

/// Runs, writes <output.path>.json and/or .csv and prints the verdicts.
/// Exit code: 0 all verdicts pass, 1 some verdict fails, 2 runtime error (an
/// error record is written to the JSON report).
inline int dispatch(const RunConfig& c, std::ostream& os = std::cout, std::ostream& log = std::clog) {
  const bool json = c.output_format != "csv";
  const bool csv = c.output_format != "json";
  try {
    const auto reports = run_command(c, log);
    if (json) write_text(c.output_path + ".json", report_document(c, reports).dump(2) + "\n");
    if (csv) write_text(c.output_path + ".csv", to_csv(reports));
    bool passed = true;
    for (const auto& r : reports) {
      if (r.name == "covering-demo") {
        os << "selected [";
        for (std::size_t i = 0; i < r.rows.size(); ++i) {
          os << (i ? "," : "") << "(" << csv_cell(r.rows[i][1]) << "," << csv_cell(r.rows[i][2]) << ")";
        }
        os << "]\n";
      }
      print_verdicts(os, r);
      passed = passed && r.passed();
    }
    os << (passed ? "all verdicts passed" : "some verdicts failed") << '\n';
    return passed ? 0 : 1;
  } catch (const std::exception& e) {
    nlohmann::json doc;
    doc["command"] = c.command;
    doc["config"] = config_map(c);
    doc["error"] = {{"type", "runtime_failure"}, {"message", e.what()}};
    doc["passed"] = false;
    try {
      if (json) write_text(c.output_path + ".json", doc.dump(2) + "\n");
    } catch (const std::exception&) {
    }
    log << "error: " << doc["error"].dump() << '\n';
    return 2;
  }
}

}  // namespace dirdiff
