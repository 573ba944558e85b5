#include <gtest/gtest.h>

#include <cmath>

#include "chordstats/random.hpp"

using namespace chordstats;

TEST(Rng, DeterministicPerStream) {
  Rng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    differs_c |= x != c.uniform();
    differs_d |= x != d.uniform();
  }
  EXPECT_TRUE(differs_c);
  EXPECT_TRUE(differs_d);
}

TEST(Rng, UniformRange) {
  Rng r(1, 0);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = r.uniform();
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
    const double y = r.uniform_open_left();
    ASSERT_GT(y, 0.0);
    ASSERT_LE(y, 1.0);
    sum += x;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(Rng, NormalMoments) {
  Rng r(2, 0);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

TEST(Direction, PlanarDirectionsHaveUnitNorm) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng r(seed, 0);
    const auto v = sample_uniform_direction(r, 2);
    EXPECT_NEAR(v[0] * v[0] + v[1] * v[1], 1.0, 1e-12);
  }
}

TEST(Direction, SpatialCoordinateMeansVanish) {
  Rng r(11, 0);
  const int n = 1000000;
  double m[3] = {0, 0, 0};
  int octant = 0;
  for (int i = 0; i < n; ++i) {
    const auto v = sample_uniform_direction(r, 3);
    for (int k = 0; k < 3; ++k) m[k] += v[k];
    octant += v[0] > 0 && v[1] > 0 && v[2] > 0;
  }
  for (double x : m) EXPECT_NEAR(x / n, 0.0, 0.005);
  EXPECT_NEAR(static_cast<double>(octant) / n, 0.125, 0.002);
}

TEST(Direction, QuadrantOccupancyIsBalanced) {
  for (std::size_t dim : {2u, 3u, 5u}) {
    Rng r(5, dim);
    const int n = 200000;
    std::vector<int> count(std::size_t{1} << dim, 0);
    for (int i = 0; i < n; ++i) {
      const auto v = sample_uniform_direction(r, dim);
      std::size_t code = 0;
      for (std::size_t k = 0; k < dim; ++k) code |= (v[k] > 0 ? 1u : 0u) << k;
      ++count[code];
    }
    const double p = 1.0 / static_cast<double>(count.size());
    const double sd = std::sqrt(p * (1 - p) / n);
    for (int c : count) EXPECT_NEAR(static_cast<double>(c) / n, p, 4.5 * sd);
  }
}

TEST(Direction, HigherDimensionsAreUnit) {
  Rng r(3, 0);
  for (std::size_t dim = 2; dim <= 7; ++dim) {
    const auto v = sample_uniform_direction(r, dim);
    double s = 0.0;
    for (double x : v.components()) s += x * x;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Direction, PositiveOrthant) {
  Rng r(4, 0);
  for (int i = 0; i < 1000; ++i) {
    for (double x : sample_positive_orthant_direction(r, 4)) EXPECT_GE(x, 0.0);
  }
}

TEST(PointInBox, InsideBox) {
  Rng r(9, 0);
  const BoxDims box({3, 4, 6});
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(box.contains(sample_point_in_box(r, box)));
}
