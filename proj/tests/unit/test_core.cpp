#include <bit>
#include <cstring>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dirdiff/descriptor.hpp"
#include "dirdiff/parallel.hpp"
#include "dirdiff/point.hpp"
#include "dirdiff/random.hpp"

using namespace dirdiff;

TEST(Point, ArithmeticAndNorms) {
  const PointN a{3.0, 4.0};
  const PointN b{1.0, -1.0};
  EXPECT_EQ(norm(a), 5.0);
  EXPECT_EQ(dot(a, b), -1.0);
  EXPECT_EQ(a + b, (PointN{4.0, 3.0}));
  EXPECT_EQ(axpy(a, 2.0, b), (PointN{5.0, 2.0}));
  EXPECT_DOUBLE_EQ(distance(a, b), std::hypot(2.0, 5.0));
}

TEST(Point, DimensionLimits) {
  EXPECT_THROW(PointN(0), std::invalid_argument);
  EXPECT_THROW(PointN(kMaxDimension + 1), std::invalid_argument);
  EXPECT_EQ(PointN::unit(3, 1), (PointN{0.0, 1.0, 0.0}));
}

TEST(Point, UnitBallVolume) {
  EXPECT_DOUBLE_EQ(unit_ball_volume(1), 2.0);
  EXPECT_DOUBLE_EQ(unit_ball_volume(2), std::numbers::pi);
  EXPECT_DOUBLE_EQ(unit_ball_volume(3), 4.0 * std::numbers::pi / 3.0);
}

TEST(Box, Geometry) {
  const Box b = Box::cube(2, 0.0, 1.0);
  EXPECT_TRUE(b.contains(PointN{0.0, 1.0}));
  EXPECT_FALSE(b.contains(PointN{1.0 + 1e-15, 0.5}));
  EXPECT_EQ(b.volume(), 1.0);
  EXPECT_EQ(b.distance_to(PointN{0.5, 0.5}), 0.0);
  EXPECT_DOUBLE_EQ(b.distance_to(PointN{-3.0, 5.0}), 5.0);
  EXPECT_TRUE(b.dilated(0.5).contains(b));
  EXPECT_DOUBLE_EQ(Box::cube(2, -1.0, 2.0).max_norm(), std::sqrt(8.0));
  EXPECT_THROW(Box(PointN{1.0, 0.0}, PointN{0.0, 1.0}), std::invalid_argument);
  EXPECT_FALSE(Box::cube(2, 0.0, 0.0).nondegenerate());
}

TEST(Descriptor, TextForm) {
  const Descriptor d{"sinusoidal", {{"a", 0.5}, {"b", 1.0}, {"c", 1.0}}};
  EXPECT_EQ(d.to_string(), "sinusoidal:a=0.5,b=1,c=1");
  EXPECT_EQ(Descriptor::parse("sinusoidal:a=0.5,b=1,c=1"), d);
  EXPECT_EQ(Descriptor::parse("constant").family, "constant");
  EXPECT_EQ(d.get_or("z", 7.0), 7.0);
  EXPECT_THROW(d.get("z"), std::invalid_argument);
}

TEST(Descriptor, RejectsMalformedText) {
  EXPECT_THROW(Descriptor::parse(""), std::invalid_argument);
  EXPECT_THROW(Descriptor::parse("shear:a"), std::invalid_argument);
  EXPECT_THROW(Descriptor::parse("shear:a=x"), std::invalid_argument);
  EXPECT_THROW(Descriptor::parse("shear:a=1,a=2"), std::invalid_argument);
}

TEST(Descriptor, RoundTripsBitExactly) {
  Rng rng(42);
  for (int trial = 0; trial < 2000; ++trial) {
    Descriptor d{"f", {}};
    const int k = static_cast<int>(rng() % 4);
    for (int i = 0; i < k; ++i) {
      // Random bit patterns cover subnormals and extreme exponents.
      double x;
      do {
        const std::uint64_t bits = rng();
        std::memcpy(&x, &bits, sizeof x);
      } while (!std::isfinite(x));
      d.params.emplace_back("p" + std::to_string(i), x);
    }
    const Descriptor back = Descriptor::parse(d.to_string());
    ASSERT_EQ(back.params.size(), d.params.size());
    for (std::size_t i = 0; i < d.params.size(); ++i) {
      EXPECT_EQ(std::bit_cast<std::uint64_t>(back.params[i].second), std::bit_cast<std::uint64_t>(d.params[i].second))
          << d.to_string();
    }
  }
}

TEST(Random, MixSeedIsDeterministicAndSpread) {
  EXPECT_EQ(mix_seed(1, 2), mix_seed(1, 2));
  EXPECT_NE(mix_seed(1, 2), mix_seed(1, 3));
  EXPECT_NE(mix_seed(1, 2), mix_seed(2, 2));
}

TEST(Random, UniformStaysInRange) {
  Rng rng(9);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform(rng, 0.0, 1.0);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  EXPECT_LT(lo, 1e-3);
  EXPECT_GT(hi, 1.0 - 1e-3);
}

TEST(Parallel, CoversEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), Parallel{4}, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(Parallel, PropagatesWorkerExceptions) {
  EXPECT_THROW(parallel_for(100, Parallel{3}, [](std::size_t i) {
                 if (i == 77) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}
