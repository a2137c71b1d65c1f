#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dirdiff/experiments.hpp"

using namespace dirdiff;

namespace {

LevelSetSetup small_setup(int resolution = 128) {
  LevelSetSetup s;
  s.window = GridSpec::ball_window(2, 2.0, resolution);
  return s;
}

}  // namespace

TEST(Experiments, SGridMidpoints) {
  const SGrid g{0.5, 5};
  const auto v = g.values();
  ASSERT_EQ(v.size(), 5u);
  EXPECT_DOUBLE_EQ(v.front(), -0.2);
  EXPECT_DOUBLE_EQ(v[2], 0.0);
  EXPECT_DOUBLE_EQ(v.back(), 0.2);
  for (double s : SGrid{0.5, 17}.values()) EXPECT_LE(std::abs(s), 0.25);
  EXPECT_THROW((SGrid{0.5, 2}.values()), std::invalid_argument);
  EXPECT_THROW((SGrid{0.0, 5}.values()), std::invalid_argument);
}

TEST(Experiments, Constants) {
  const double pi = std::numbers::pi;
  EXPECT_NEAR(weak_type_constant(2, 0.5, 1.0), 36.0 * pi * pi, 1e-10);
  EXPECT_NEAR(weak_type_constant(2, 0.5, 1.0), 355.3057584392169, 1e-9);
  EXPECT_NEAR(weak_type_intermediate_constant(2, 0.5, 1.0), 2.0 * pi / 0.25, 1e-12);
  EXPECT_NEAR(continuity_constant(0.5, 1.0), 0.25 / 0.75, 1e-15);
  // 2D: (1/t) int_0^t 2 pi/(1 - sK)^2 ds = 2 pi/(1 - tK).
  EXPECT_NEAR(lp_bound_factor(2, 0.2, 1.0), 2.0 * pi / 0.8, 1e-12);
  EXPECT_NEAR(lp_bound_factor(2, 0.2, 0.0), 2.0 * pi, 1e-12);
  EXPECT_THROW(validate_horizon(0.5, 2.0), std::invalid_argument);
  EXPECT_THROW(validate_horizon(-0.5, 1.0), std::invalid_argument);
  EXPECT_NO_THROW(validate_horizon(0.95, 1.0));
}

TEST(NormConvergence, RejectsInfiniteP) {
  NormConvergenceSetup s;
  s.p = std::numeric_limits<double>::infinity();
  EXPECT_THROW(run_norm_convergence(gaussian_bump(2, 0.25), constant_field(2), s), std::invalid_argument);
  s.p = 1.0;
  s.t_values = {0.1, 0.2};
  EXPECT_THROW(run_norm_convergence(gaussian_bump(2, 0.25), constant_field(2), s), std::invalid_argument);
}

TEST(NormConvergence, ZeroFunctionHasZeroError) {
  NormConvergenceSetup s;
  s.grid.resolution = 64;
  const auto r = run_norm_convergence(zero_field(2), shear_field(2, 1.0), s);
  for (const auto& row : r.rows) EXPECT_EQ(std::get<double>(row[4]), 0.0);
}

TEST(NormConvergence, IndicatorErrorEqualsT) {
  // Along e1 the L1 error of averaging 1_[0,1]^2 is t/2 per transverse edge.
  NormConvergenceSetup s;
  s.t_values = {0.2, 0.1, 0.05, 0.025};
  s.grid.resolution = 768;
  const auto r = run_norm_convergence(box_indicator(2, 0.0, 1.0), constant_field(2), s);
  for (const auto& row : r.rows) {
    const double t = std::get<double>(row[3]);
    EXPECT_NEAR(std::get<double>(row[4]), t, 0.03 * t) << t;
  }
  EXPECT_TRUE(r.passed());
}

TEST(NormConvergence, BumpReportHasVerdictsAndBounds) {
  NormConvergenceSetup s;
  s.grid.resolution = 256;
  const auto r = run_norm_convergence(gaussian_bump(2, 0.25), sinusoidal_field(2, 0.5, 1.0, 1.0), s);
  EXPECT_EQ(r.rows.size(), s.t_values.size());
  EXPECT_EQ(r.verdicts.size(), 3u);
  EXPECT_TRUE(r.passed());
}

TEST(WeakType, ZeroFunctionGivesZeroLhs) {
  const auto r = run_weak_type(zero_field(2), shear_field(2, 1.0), small_setup(), {0.5, 1.0}, SGrid{0.5, 3});
  for (const auto& row : r.rows) EXPECT_EQ(std::get<double>(row[6]), 0.0);
  EXPECT_TRUE(r.flagged("midpoint_s_integral"));
}

TEST(WeakType, InequalityHoldsAndRowsCoverEveryPair) {
  const std::vector<double> ls{0.2, 0.6};
  const auto r = run_weak_type(box_indicator(2, 0.0, 1.0), shear_field(2, 1.0), small_setup(), ls, SGrid{0.5, 3});
  EXPECT_EQ(r.rows.size(), ls.size() * 3);
  EXPECT_EQ(r.verdicts.size(), ls.size());
  EXPECT_TRUE(r.passed());
  EXPECT_NEAR(r.inputs["constant"].get<double>(), 355.3057584392169, 1e-9);
}

TEST(WeakType, Errors) {
  EXPECT_THROW(run_weak_type(gaussian_bump(2, 0.25), shear_field(2, 2.0), small_setup(), {1.0}, SGrid{0.5, 3}),
               std::invalid_argument);
  EXPECT_THROW(run_weak_type(gaussian_bump(2, 0.25), shear_field(2, 1.0), small_setup(), {0.0}, SGrid{0.5, 3}),
               std::invalid_argument);
  LevelSetSetup tiny = small_setup();
  tiny.window = GridSpec::ball_window(2, 1.0, 64);
  EXPECT_THROW(run_weak_type(gaussian_bump(2, 0.25), shear_field(2, 1.0), tiny, {1.0}, SGrid{0.5, 3}),
               std::domain_error);
}

TEST(Pointwise, ConstantFieldErrorsIndependentOfS) {
  PointwiseSetup s;
  Rng rng(1);
  std::vector<PointN> pts;
  for (int i = 0; i < 50; ++i) pts.push_back(uniform_point(rng, Box::cube(2, -1.0, 1.0)));
  const auto r = run_pointwise(gaussian_bump(2, 0.25), constant_field(2), s, {-0.2, 0.0, 0.2}, pts);
  ASSERT_EQ(r.rows.size(), 150u);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_EQ(std::get<double>(r.rows[i][5]), std::get<double>(r.rows[i + 50][5]));
    EXPECT_EQ(std::get<double>(r.rows[i][5]), std::get<double>(r.rows[i + 100][5]));
  }
  EXPECT_TRUE(r.passed());
}

TEST(Pointwise, IndicatorFailuresAreRare) {
  PointwiseSetup s;
  Rng rng(2);
  std::vector<PointN> pts;
  for (int i = 0; i < 1000; ++i) pts.push_back(uniform_point(rng, Box::cube(2, -2.0, 2.0)));
  const auto r = run_pointwise(box_indicator(2, 0.0, 1.0), shear_field(2, 1.0), s, {0.2}, pts);
  EXPECT_TRUE(r.passed());
  EXPECT_THROW(run_pointwise(box_indicator(2, 0.0, 1.0), shear_field(2, 1.0), s, {0.3}, pts), std::invalid_argument);
}

TEST(Continuity, ConstantFieldMeasureIsFlat) {
  const auto r = run_continuity_in_s(gaussian_bump(2, 0.25), constant_field(2), small_setup(), 2.5, SGrid{0.5, 5});
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    EXPECT_EQ(std::get<double>(r.rows[i][3]), std::get<double>(r.rows[0][3]));
  }
  EXPECT_TRUE(r.passed());
  EXPECT_THROW(run_continuity_in_s(box_indicator(2, 0.0, 1.0), constant_field(2), small_setup(), 0.5, SGrid{0.5, 5}),
               std::invalid_argument);
}

TEST(Continuity, ShearJumpsWithinBand) {
  const auto r = run_continuity_in_s(tent(2, 0.5), shear_field(2, 1.0), small_setup(), 2.0, SGrid{0.5, 9});
  EXPECT_TRUE(r.passed());
}

TEST(Decay, NestedAndNonincreasing) {
  const auto cat = catalog_scalar_fields(2);
  std::vector<double> ns;
  for (int k = 1; k <= 16; ++k) ns.push_back(k);
  const auto r = run_h_n_decay(cat, shear_field(2, 1.0), small_setup(), {0.0, 0.2}, ns, {0.25, 0.45});
  EXPECT_TRUE(r.flagged("catalog_surrogate"));
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    if (std::get<double>(r.rows[i][1]) != std::get<double>(r.rows[i - 1][1])) continue;
    EXPECT_LE(std::get<double>(r.rows[i][3]), std::get<double>(r.rows[i - 1][3]));
  }
}

TEST(Decay, RejectsCatalogOutsideUnitBall) {
  ScalarFacts facts;
  facts.lp_norm = [](double) { return std::optional<double>(2.0); };
  const ScalarField heavy(2, [](const PointN&) { return 2.0; }, Regularity::indicator, Box::cube(2, 0.0, 1.0),
                          {"heavy", {}}, facts);
  EXPECT_THROW(run_h_n_decay(std::vector<ScalarField>{heavy}, shear_field(2, 1.0), small_setup(), {0.0}, {1, 2}, {0.25}),
               std::invalid_argument);
}

TEST(Decay, LogSlope) {
  const std::vector<double> x{1, 2, 4, 8};
  const std::vector<double> y{3, 2, 1, 0};
  EXPECT_NEAR(log_slope(x, y), -1.0 / std::log(2.0), 1e-12);
}

TEST(CAlpha, InequalityAndArguments) {
  const auto cat = catalog_scalar_fields(2);
  const auto r = run_c_alpha(cat, shear_field(2, 1.0), small_setup(), {0.0}, 0.25, 16, {1.5, 4.0, 1e9});
  EXPECT_TRUE(r.passed());
  EXPECT_THROW(run_c_alpha(cat, shear_field(2, 1.0), small_setup(), {0.0}, 0.5, 16, {2.0}), std::invalid_argument);
  EXPECT_THROW(run_c_alpha(cat, shear_field(2, 1.0), small_setup(), {0.0}, 0.25, 0, {2.0}), std::invalid_argument);
  // lambda -> infinity: the level set is empty.
  for (const auto& row : r.rows) {
    if (std::get<double>(row[3]) == 1e9) {
      EXPECT_EQ(std::get<double>(row[4]), 0.0);
    }
  }
}

TEST(InvertCheck, ConstantFieldIsExact) {
  const auto fields = std::vector<UnitVectorField>{constant_field(2)};
  const auto r = run_invert_check(fields, {0.0, 0.5, 0.9}, 1000, {}, 1);
  EXPECT_TRUE(r.passed());
  for (const auto& row : r.rows) EXPECT_LE(std::get<double>(row[5]), 1e-15);
}

TEST(Distortion, SmallSweepPasses) {
  const auto r = run_distortion(catalog_vector_fields(2), 0.5, 3, 128, {}, 9);
  EXPECT_EQ(r.rows.size(), 3u * 3u * 4u);
  EXPECT_TRUE(r.passed());
}

TEST(CoveringDemo, Report) {
  const auto r = run_covering_demo(IntervalCollection({{0, 2}, {1, 3}, {2, 4}}), 3.9);
  EXPECT_EQ(r.rows.size(), 2u);
  EXPECT_TRUE(r.passed());
}

TEST(Determinism, RerunsAreByteIdentical) {
  auto once = [] {
    return to_csv(run_weak_type(gaussian_bump(2, 0.25), sinusoidal_field(2, 0.5, 1.0, 1.0), small_setup(96),
                                {0.3, 0.7}, SGrid{0.5, 3}, Parallel{3}));
  };
  const auto a = once();
  EXPECT_EQ(a, once());
  const auto b = to_csv(run_weak_type(gaussian_bump(2, 0.25), sinusoidal_field(2, 0.5, 1.0, 1.0), small_setup(96),
                                      {0.3, 0.7}, SGrid{0.5, 3}, Parallel{1}));
  EXPECT_EQ(a, b);
}
