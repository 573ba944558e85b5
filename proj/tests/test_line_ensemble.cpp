#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "chordstats/analytic.hpp"
#include "chordstats/line_ensemble.hpp"
#include "chordstats/quadrature.hpp"
#include "chordstats/stats.hpp"

using namespace chordstats;

TEST(Shadow, Examples) {
  EXPECT_DOUBLE_EQ(projected_shadow_area(BoxDims({1, 1, 1}), UnitVector({0, 0, 1})), 1.0);
  EXPECT_NEAR(projected_shadow_area(BoxDims({3, 4, 6}),
                                    UnitVector::normalized({1, 1, 1})),
              54.0 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(54.0 / std::sqrt(3.0), 31.1769, 1e-4);
  EXPECT_DOUBLE_EQ(projected_shadow_area(BoxDims({1, 2}), UnitVector({1, 0})), 2.0);
  EXPECT_THROW(projected_shadow_area(BoxDims({1, 2}), UnitVector({1, 0, 0})),
               std::invalid_argument);
}

TEST(NormalizingConstant, Examples) {
  EXPECT_NEAR(normalizing_constant(BoxDims({3, 4, 6})), 2 * std::numbers::pi * 54, 1e-12);
  EXPECT_NEAR(normalizing_constant(BoxDims({3, 4, 6})), 339.292, 1e-3);
  EXPECT_NEAR(normalizing_constant(BoxDims({1, 1, 1})), 6 * std::numbers::pi, 1e-12);
  EXPECT_DOUBLE_EQ(normalizing_constant(BoxDims({1, 2})), 12.0);
  EXPECT_THROW(normalizing_constant(BoxDims({1, 1, 1, 1})), std::invalid_argument);
}

TEST(NormalizingConstant, PlanarMatchesQuadrature) {
  const double a = 1.0, b = 2.0;
  const double q = 4.0 * quadrature::integrate(
                             [&](double th) {
                               return a * std::sin(th) + b * std::cos(th);
                             },
                             0.0, std::numbers::pi / 2);
  EXPECT_NEAR(q, normalizing_constant(BoxDims({a, b})), 1e-12);
}

// C is the shadow area integrated over all directions.
TEST(NormalizingConstant, SpatialMatchesMonteCarlo) {
  const BoxDims box({3, 4, 6});
  Rng rng(1, stream_id(StreamPurpose::Test, 10));
  const int n = 400000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += projected_shadow_area(box, sample_uniform_direction(rng, 3));
  }
  const double integral = 4.0 * std::numbers::pi * sum / n;
  EXPECT_NEAR(integral / normalizing_constant(box), 1.0, 0.005);
}

TEST(ChordLength, AxisAndMiss) {
  const BoxDims box({1, 2});
  EXPECT_DOUBLE_EQ(chord_length(box, {UnitVector({1, 0}), {0.0, 0.5}}), 1.0);
  EXPECT_DOUBLE_EQ(chord_length(box, {UnitVector({0, 1}), {0.5, 0.0}}), 2.0);
  EXPECT_EQ(chord_length(box, {UnitVector({1, 0}), {0.0, 3.0}}), 0.0);
  EXPECT_NEAR(chord_length(box, {UnitVector::normalized({1, 2}), {0.0, 0.0}}),
              std::sqrt(5.0), 1e-15);
}

TEST(SampleLine, OffsetIsOrthogonalAndChordIsBounded) {
  for (const auto& box : {BoxDims({1, 2}), BoxDims({3, 4, 6})}) {
    Rng rng(4, stream_id(StreamPurpose::Test, 11));
    for (int i = 0; i < 20000; ++i) {
      const auto d = sample_line(rng, box);
      double dot = 0.0;
      for (std::size_t k = 0; k < box.dimension(); ++k) {
        dot += d.line.offset[k] * d.line.direction[k];
      }
      ASSERT_NEAR(dot, 0.0, 1e-12);
      ASSERT_GT(d.length, 0.0);
      ASSERT_LE(d.length, diag(box) * (1 + 1e-12));
      ASSERT_DOUBLE_EQ(d.length, chord_length(box, d.line));
    }
  }
}

TEST(Chords, Deterministic) {
  const BoxDims box({3, 4, 6});
  const auto a = sample_chords(box, 50000, 3, 1);
  const auto b = sample_chords(box, 50000, 3, 3);
  EXPECT_EQ(a.lengths, b.lengths);
  EXPECT_EQ(a.size(), 50000u);
  EXPECT_EQ(a.meta.model, SampleModel::LineEnsemble);
  EXPECT_THROW(sample_chords(box, 0, 3), std::invalid_argument);
  EXPECT_THROW(sample_chords(BoxDims({1, 1, 1, 1}), 10, 3), std::invalid_argument);
}

namespace {

void expect_mean_close(const BoxDims& box, double expect, double tol,
                       std::uint64_t seed) {
  const auto s = sample_chords(box, 1000000, seed);
  double m = 0.0, m2 = 0.0;
  for (double x : s.lengths) {
    m += x;
    m2 += x * x;
  }
  m /= static_cast<double>(s.size());
  const double sd = std::sqrt(m2 / static_cast<double>(s.size()) - m * m);
  const double se = sd / std::sqrt(static_cast<double>(s.size()));
  EXPECT_NEAR(m, expect, tol);
  EXPECT_LT(std::abs(m - expect), 3.5 * se);
}

}  // namespace

TEST(Chords, MeanUnitSquare) {
  expect_mean_close(BoxDims({1, 1}), std::numbers::pi / 4, 0.002, 21);
}

TEST(Chords, MeanUnitCube) {
  expect_mean_close(BoxDims({1, 1, 1}), 2.0 / 3.0, 0.002, 22);
}

TEST(Chords, MeanOblongBoxes) {
  expect_mean_close(BoxDims({1, 2}), mean_free_path(BoxDims({1, 2})), 0.005, 23);
  expect_mean_close(BoxDims({3, 4, 6}), mean_free_path(BoxDims({3, 4, 6})), 0.01, 24);
}

TEST(Chords, MatchesClosedFormCdf) {
  const BoxDims box({1, 2});
  const EcdfSummary e(sample_chords(box, 1000000, 25));
  EXPECT_LT(ks_distance(e, [&](double t) { return cdf_X_2d(box, t); }), 0.005);
}
