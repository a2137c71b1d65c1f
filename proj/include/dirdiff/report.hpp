#pragma once

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dirdiff/descriptor.hpp"

namespace dirdiff {

using Cell = std::variant<std::int64_t, double, std::string>;

/// One checked claim with its quantitative margin (>= 0 when it holds).
struct Verdict {
  std::string claim;
  bool pass = false;
  double margin = 0.0;
  std::string note;
};

/// Structured record of one runner invocation: its inputs, a table of rows
/// and the verdicts drawn from them.
struct ExperimentReport {
  std::string name;
  nlohmann::json inputs = nlohmann::json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<Verdict> verdicts;
  /// Flags such as "catalog_surrogate" or "dyadic_t_grid" naming the finite
  /// stand-ins used for infinite families.
  std::vector<std::string> provenance;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
      throw std::logic_error(name + ": row has " + std::to_string(row.size()) + " cells, expected " +
                             std::to_string(columns.size()));
    }
    rows.push_back(std::move(row));
  }

  void check(std::string claim, bool pass, double margin, std::string note = {}) {
    verdicts.push_back({std::move(claim), pass, margin, std::move(note)});
  }

  bool passed() const {
    for (const auto& v : verdicts) {
      if (!v.pass) return false;
    }
    return true;
  }

  bool flagged(const std::string& flag) const {
    for (const auto& p : provenance) {
      if (p == flag) return true;
    }
    return false;
  }
};

inline std::string csv_cell(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&cell)) return format_real(*d);
  const auto& s = std::get<std::string>(cell);
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_csv_row(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
}

/// Header plus one line per row; 17 significant digits, comma separated, LF.
/// Reports must share a column layout (they do when produced by one runner).
inline std::string to_csv(const std::vector<ExperimentReport>& reports) {
  std::string out;
  if (reports.empty()) return out;
  std::vector<std::string> header;
  for (const auto& c : reports.front().columns) header.push_back(csv_cell(c));
  write_csv_row(out, header);
  for (const auto& r : reports) {
    if (r.columns != reports.front().columns) throw std::logic_error("to_csv: reports disagree on columns");
    for (const auto& row : r.rows) {
      std::vector<std::string> cells;
      for (const auto& c : row) cells.push_back(csv_cell(c));
      write_csv_row(out, cells);
    }
  }
  return out;
}

inline std::string to_csv(const ExperimentReport& r) { return to_csv(std::vector<ExperimentReport>{r}); }

inline nlohmann::json cell_json(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return format_real(v);
        }
        return v;
      },
      cell);
}

inline nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["inputs"] = r.inputs;
  j["columns"] = r.columns;
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    auto jr = nlohmann::json::array();
    for (const auto& c : row) jr.push_back(cell_json(c));
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  auto verdicts = nlohmann::json::array();
  for (const auto& v : r.verdicts) {
    nlohmann::json jv{{"claim", v.claim}, {"pass", v.pass}, {"margin", std::isfinite(v.margin) ? nlohmann::json(v.margin) : nlohmann::json(format_real(v.margin))}};
    if (!v.note.empty()) jv["note"] = v.note;
    verdicts.push_back(std::move(jv));
  }
  j["verdicts"] = std::move(verdicts);
  j["provenance"] = r.provenance;
  j["passed"] = r.passed();
  return j;
}

/// "PASS|FAIL  report: claim (margin m)" lines.
inline void print_verdicts(std::ostream& os, const ExperimentReport& r) {
  for (const auto& v : r.verdicts) {
    os << (v.pass ? "PASS" : "FAIL") << "  " << r.name << ": " << v.claim << " (margin " << format_real(v.margin) << ")";
    if (!v.note.empty()) os << " [" << v.note << "]";
    os << '\n';
  }
}

}  // namespace dirdiff
