#include <cmath>

#include <gtest/gtest.h>

#include "dirdiff/perturb.hpp"
#include "oracles.hpp"

using namespace dirdiff;

TEST(Perturb, ShearInverseMatchesFrozenValue) {
  // x + 0.4 cos x = 0.5, y = 0.2 - 0.4 sin x (solved to 30 digits offline).
  const PerturbationMap map(shear_field(2, 1.0), 0.4);
  const Inverse inv = invert_certified(map, PointN{0.5, 0.2});
  EXPECT_NEAR(inv.point[0], 0.10208235206224007524, 1e-10);
  EXPECT_NEAR(inv.point[1], 0.15923794092932810766, 1e-10);
  EXPECT_LE(inv.error_bound, 1e-10);
}

TEST(Perturb, InverseAgreesWithNewtonOracle) {
  Rng rng(17);
  for (std::size_t n : {2u, 3u}) {
    for (const auto& v : catalog_vector_fields(n)) {
      for (double s : {-0.9, -0.3, 0.45, 0.9}) {
        if (std::abs(s) * v.lipschitz_k() > kMaxContraction) continue;
        const PerturbationMap map(v, s);
        for (int i = 0; i < 200; ++i) {
          const PointN z = uniform_point(rng, Box::cube(n, -2.0, 2.0));
          const PointN expected = oracle::newton_inverse([&](const PointN& x) { return v(x); }, s, z);
          const Inverse inv = invert_certified(map, z);
          ASSERT_LE(distance(inv.point, expected), 1e-10 + 1e-13) << v.descriptor().to_string() << " s=" << s;
        }
      }
    }
  }
}

TEST(Perturb, RoundTripWithinTwiceTolerance) {
  Rng rng(23);
  std::vector<PointN> pts;
  for (int i = 0; i < 2000; ++i) pts.push_back(uniform_point(rng, Box::cube(2, -2.0, 2.0)));
  for (double q : {0.0, 0.25, 0.5, 0.9}) {
    const PerturbationMap map(shear_field(2, 1.0), q);
    EXPECT_LE(roundtrip_error(map, pts), 2e-10);
  }
}

TEST(Perturb, ConstantFieldInverseIsExactTranslation) {
  const PerturbationMap map(constant_field(2, 0.3), 0.7);
  const PointN z{0.25, -1.5};
  const Inverse inv = invert_certified(map, z);
  EXPECT_EQ(inv.iterations, 0);
  EXPECT_LE(distance(apply(map, inv.point), z), 1e-15);
}

TEST(Perturb, IterationCountWithinGeometricBound) {
  Rng rng(3);
  for (double q : {0.25, 0.5, 0.9}) {
    const PerturbationMap map(shear_field(2, 1.0), q);
    for (int i = 0; i < 500; ++i) {
      const PointN z = uniform_point(rng, Box::cube(2, -2.0, 2.0));
      const Inverse inv = invert_certified(map, z);
      // The bound step_k q/(1-q) <= q^k first/(1-q) reaches tol by this k.
      const double k = std::ceil(std::log(1e-10 * (1.0 - q) / inv.first_step) / std::log(q));
      EXPECT_LE(inv.iterations, std::max(1.0, k) + 1.0) << "q=" << q;
    }
  }
}

TEST(Perturb, BiLipschitzSandwich) {
  Rng rng(8);
  for (const auto& v : catalog_vector_fields(2)) {
    for (double s : {-0.45, 0.2, 0.45}) {
      const PerturbationMap map(v, s);
      const double q = map.contraction();
      for (int i = 0; i < 10000; ++i) {
        const PointN x = uniform_point(rng, Box::cube(2, -2.0, 2.0));
        const PointN y = uniform_point(rng, Box::cube(2, -2.0, 2.0));
        const double d = distance(x, y);
        const double dz = distance(apply(map, x), apply(map, y));
        ASSERT_LE(dz, (1.0 + q) * d + 1e-12);
        ASSERT_GE(dz, (1.0 - q) * d - 1e-12);
      }
    }
  }
}

TEST(Perturb, PushforwardLipschitzBound) {
  for (const auto& v : catalog_vector_fields(2)) {
    for (double s : {-0.25, 0.25, 0.45}) {
      const PerturbationMap map(v, s);
      const auto w = pushforward_field(map);
      const double est = estimate_lipschitz(w, {Box::cube(2, -2.0, 2.0), 20000, 0.05}, 4);
      EXPECT_LE(est, pushforward_lipschitz(map) + 1e-6);
      EXPECT_LE(pushforward_lipschitz(map), 2.0 * v.lipschitz_k() + 1e-15);
      EXPECT_EQ(w.descriptor().family, "pushforward");
      EXPECT_EQ(w.descriptor().get("s"), s);
    }
  }
}

TEST(Perturb, RejectsNonContractingShifts) {
  EXPECT_THROW(PerturbationMap(shear_field(2, 1.0), 1.0), std::invalid_argument);
  EXPECT_THROW(PerturbationMap(shear_field(2, 1.0), -1.2), std::invalid_argument);
  EXPECT_THROW(PerturbationMap(shear_field(2, 1.0), 0.96), std::invalid_argument);
  EXPECT_NO_THROW(PerturbationMap(shear_field(2, 1.0), 0.95));
  EXPECT_NO_THROW(PerturbationMap(constant_field(2), 100.0));
  EXPECT_THROW(PerturbationMap(shear_field(2, 1.0), std::nan("")), std::invalid_argument);
}

TEST(Perturb, SolverReportsMissingCertificate) {
  const PerturbationMap map(shear_field(2, 1.0), 0.9, SolverSpec{1e-14, 3});
  EXPECT_THROW(invert(map, PointN{1.0, 1.0}), SolverError);
  EXPECT_THROW((SolverSpec{0.0, 10}.validate()), std::invalid_argument);
  EXPECT_THROW((SolverSpec{1e-10, 0}.validate()), std::invalid_argument);
}

TEST(Perturb, EarlyExitStopsWhenSettled) {
  const PerturbationMap map(shear_field(2, 1.0), 0.9);
  const Inverse full = invert_certified(map, PointN{0.3, 0.3});
  const Inverse early = invert_until(map, PointN{0.3, 0.3}, [](const PointN&, double bound) { return bound < 0.1; });
  EXPECT_LT(early.iterations, full.iterations);
  EXPECT_LE(distance(early.point, full.point), early.error_bound + full.error_bound);
}
