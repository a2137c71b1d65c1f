#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "dirdiff/fields.hpp"

using namespace dirdiff;

namespace {

// Radial integral of |F|^p over R^n by G-K on [0, R], for radial F(r e1).
double radial_lp(const ScalarField& f, double p, double radius, double inner = 0.0) {
  const double n = static_cast<double>(f.dimension());
  const double sphere = n * unit_ball_volume(f.dimension());
  auto g = [&](double r) {
    PointN x(f.dimension());
    x[0] = r;
    return std::pow(std::abs(f(x)), p) * sphere * std::pow(r, n - 1.0);
  };
  return std::pow(boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, inner, radius, 20, 1e-13), 1.0 / p);
}

}  // namespace

TEST(VectorFields, CatalogFieldsHaveUnitNorm) {
  for (std::size_t n : {2u, 3u}) {
    Rng rng(11 + n);
    const Box box = Box::cube(n, -5.0, 5.0);
    for (const auto& v : catalog_vector_fields(n)) {
      for (int i = 0; i < 10000; ++i) {
        ASSERT_LE(std::abs(norm(v(uniform_point(rng, box))) - 1.0), 1e-12) << v.descriptor().to_string();
      }
    }
  }
}

TEST(VectorFields, DeclaredLipschitzDominatesSamples) {
  for (std::size_t n : {2u, 3u}) {
    for (const auto& v : catalog_vector_fields(n)) {
      const double global = estimate_lipschitz(v, {Box::cube(n, -2.0, 2.0), 100000, std::nullopt}, 3);
      const double local = estimate_lipschitz(v, {Box::cube(n, -2.0, 2.0), 100000, 0.05}, 4);
      EXPECT_LE(global, v.lipschitz_k() + 1e-9) << v.descriptor().to_string();
      EXPECT_LE(local, v.lipschitz_k() + 1e-9) << v.descriptor().to_string();
    }
  }
}

TEST(VectorFields, EstimatedConstantsMatchCatalogExamples) {
  const Box box = Box::cube(2, -2.0, 2.0);
  EXPECT_EQ(estimate_lipschitz(constant_field(2), {box, 100000, std::nullopt}, 1), 0.0);
  const double shear = estimate_lipschitz(shear_field(2, 1.0), {box, 100000, std::nullopt}, 1);
  EXPECT_GT(shear, 0.9);
  EXPECT_LE(shear, 1.0);
  const double sine = estimate_lipschitz(sinusoidal_field(2, 0.5, 1.0, 1.0), {box, 100000, std::nullopt}, 1);
  EXPECT_LE(sine, 0.5 * std::sqrt(2.0));
  EXPECT_GT(sine, 0.5);
}

TEST(VectorFields, PhaseFieldConstruction) {
  const auto c = constant_field(2);
  EXPECT_EQ(c(PointN{3.0, -1.0}), (PointN{1.0, 0.0}));
  EXPECT_EQ(c.lipschitz_k(), 0.0);
  EXPECT_EQ(shear_field(2, -2.0).lipschitz_k(), 2.0);
  EXPECT_DOUBLE_EQ(sinusoidal_field(2, 0.5, 1.0, 1.0).lipschitz_k(), 0.5 * std::sqrt(2.0));
  const auto s3 = shear_field(3, 1.0)(PointN{1.0, 0.0, 0.0});
  EXPECT_EQ(s3[2], 0.0);
  EXPECT_DOUBLE_EQ(s3[0], std::cos(1.0));
  EXPECT_EQ(constant_field(1, std::numbers::pi)(PointN{0.3}), (PointN{-1.0}));
}

TEST(VectorFields, ConstructionErrors) {
  EXPECT_THROW(make_phase_field(0, [](const PointN&) { return 0.0; }, 0.0), std::invalid_argument);
  EXPECT_THROW(make_phase_field(1, [](const PointN& x) { return x[0]; }, 1.0), std::invalid_argument);
  EXPECT_THROW(shear_field(1, 1.0), std::invalid_argument);
  EXPECT_THROW(UnitVectorField(2, [](const PointN& x) { return x; }, -1.0, {"x", {}}), std::invalid_argument);
  EXPECT_THROW(make_vector_field(Descriptor::parse("spiral:a=1"), 2), std::invalid_argument);
  EXPECT_THROW(make_vector_field(Descriptor::parse("shear:b=1"), 2), std::invalid_argument);
}

TEST(VectorFields, DescriptorsRebuildTheSameField) {
  Rng rng(5);
  for (const auto& v : catalog_vector_fields(2)) {
    const auto w = make_vector_field(Descriptor::parse(v.descriptor().to_string()), 2);
    EXPECT_EQ(w.lipschitz_k(), v.lipschitz_k());
    for (int i = 0; i < 100; ++i) {
      const PointN x = uniform_point(rng, Box::cube(2, -3.0, 3.0));
      EXPECT_EQ(w(x), v(x));
    }
  }
}

TEST(ScalarFields, ZeroOutsideSupportBox) {
  for (std::size_t n : {1u, 2u, 3u}) {
    Rng rng(n);
    for (const auto& f : catalog_scalar_fields(n)) {
      const Box big = f.support_box().dilated(3.0);
      for (int i = 0; i < 5000; ++i) {
        const PointN x = uniform_point(rng, big);
        if (!f.support_box().contains(x)) {
          ASSERT_EQ(f(x), 0.0) << f.descriptor().to_string();
        }
      }
    }
  }
}

TEST(ScalarFields, CatalogMembersHaveUnitMass) {
  for (std::size_t n : {1u, 2u, 3u}) {
    for (const auto& f : catalog_scalar_fields(n)) {
      ASSERT_TRUE(f.l1_norm().has_value());
      EXPECT_NEAR(*f.l1_norm(), 1.0, 1e-12) << f.descriptor().to_string();
    }
  }
}

TEST(ScalarFields, DeclaredNormsMatchRadialQuadrature) {
  const auto bump = gaussian_bump(2, 0.25);
  EXPECT_NEAR(radial_lp(bump, 1.0, 1.0), 1.0, 1e-10);
  EXPECT_NEAR(*bump.lp_norm(2.0), 1.5957693011858977, 1e-12);
  EXPECT_NEAR(radial_lp(bump, 2.0, 1.0), *bump.lp_norm(2.0), 1e-10);
  const auto t = tent(2, 0.5);
  EXPECT_NEAR(*t.lp_norm(2.0), 1.3819765978853419, 1e-12);
  EXPECT_NEAR(radial_lp(t, 3.0, 0.5), *t.lp_norm(3.0), 1e-10);
  const auto sing = truncated_singularity(2, 1.0, 1.0);
  EXPECT_NEAR(sing(PointN{0.5, 0.0}), 1.0 / (2.0 * std::numbers::pi * 0.5), 1e-15);
  EXPECT_NEAR(radial_lp(sing, 1.0, 1.0, 1e-12), 1.0, 1e-9);
  const auto sing3 = truncated_singularity(3, 2.25, 1.0);
  EXPECT_NEAR(radial_lp(sing3, 1.0, 1.0, 1e-12), 1.0, 1e-6);
}

TEST(ScalarFields, BumpTruncationLosesLittleMass) {
  // Mass beyond |X| = 4 sigma relative to the full Gaussian is e^-16 in 2D.
  const double untruncated = std::numbers::pi * 0.25 * 0.25;
  const auto f = gaussian_bump(2, 0.25);
  const double peak = *f.sup_abs();
  EXPECT_LT(std::abs(1.0 / peak - untruncated) / untruncated, 1e-6);
  EXPECT_EQ(f.regularity(), Regularity::smooth);
}

TEST(ScalarFields, SingularityNormsOnlyWhereIntegrable) {
  const auto f = truncated_singularity(2, 1.0, 1.0);
  EXPECT_TRUE(f.lp_norm(1.5).has_value());
  EXPECT_FALSE(f.lp_norm(2.0).has_value());
  EXPECT_FALSE(f.lp_norm(3.0).has_value());
  EXPECT_FALSE(f.modulus(0.1).has_value());
  EXPECT_THROW(truncated_singularity(2, 2.0, 1.0), std::invalid_argument);
  EXPECT_THROW(truncated_singularity(2, 1.0, 0.0), std::invalid_argument);
}

TEST(ScalarFields, DeclaredModulusDominatesSampledModulus) {
  for (const auto& f : {gaussian_bump(2, 0.25), tent(2, 0.5)}) {
    for (double delta : {0.001, 0.01, 0.1}) {
      EXPECT_LE(sampled_modulus(f, delta, 100000, 3), *f.modulus(delta) + 1e-12) << f.descriptor().to_string();
    }
  }
}

TEST(ScalarFields, SampledModulusSeesJumps) {
  const auto f = box_indicator(2, 0.0, 1.0);
  EXPECT_FALSE(f.modulus(0.1).has_value());
  EXPECT_EQ(modulus_of_continuity(f, 0.1), 1.0);
}

TEST(ScalarFields, DescriptorRoundTrip) {
  for (const auto& f : catalog_scalar_fields(2)) {
    const auto g = make_scalar_field(Descriptor::parse(f.descriptor().to_string()), 2);
    EXPECT_EQ(g.descriptor(), f.descriptor());
    EXPECT_EQ(g(PointN{0.1, 0.2}), f(PointN{0.1, 0.2}));
    EXPECT_EQ(g.support_box(), f.support_box());
  }
  EXPECT_THROW(make_scalar_field(Descriptor::parse("blob"), 2), std::invalid_argument);
  EXPECT_THROW(make_scalar_field(Descriptor::parse("bump:width=1"), 2), std::invalid_argument);
  EXPECT_EQ(make_scalar_field(Descriptor::parse("zero"), 2)(PointN{0.0, 0.0}), 0.0);
}
