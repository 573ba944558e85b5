#include <gtest/gtest.h>

#include <cmath>

#include "chordstats/core.hpp"

using namespace chordstats;

TEST(BoxDims, RejectsBadSides) {
  EXPECT_THROW(BoxDims({1.0}), std::invalid_argument);
  EXPECT_THROW(BoxDims({1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(BoxDims({1.0, -2.0}), std::invalid_argument);
  EXPECT_THROW(BoxDims({1.0, INFINITY}), std::invalid_argument);
  EXPECT_THROW(BoxDims({1.0, NAN}), std::invalid_argument);
}

TEST(BoxDims, KeepsOrderAndSortsOnRequest) {
  const BoxDims b({6.0, 3.0, 4.0});
  EXPECT_EQ(b.dimension(), 3u);
  EXPECT_EQ(b.side(0), 6.0);
  EXPECT_EQ(b.sorted(), (std::vector<double>{3.0, 4.0, 6.0}));
  EXPECT_DOUBLE_EQ(b.volume(), 72.0);
  EXPECT_DOUBLE_EQ(b.surface_area(), 2.0 * (24.0 + 18.0 + 12.0));
}

TEST(BoxDims, Diagonal) {
  EXPECT_NEAR(diag(BoxDims({1, 2})), 2.2360679774997896, 1e-15);
  EXPECT_NEAR(diag(BoxDims({3, 4, 6})), 7.810249675906654, 1e-14);
  EXPECT_DOUBLE_EQ(diag(BoxDims({1, 1, 1, 1})), 2.0);
}

TEST(BoxDims, ContainsClosedBox) {
  const BoxDims b({1, 2});
  EXPECT_TRUE(b.contains(std::vector<double>{0.0, 0.0}));
  EXPECT_TRUE(b.contains(std::vector<double>{1.0, 2.0}));
  EXPECT_FALSE(b.contains(std::vector<double>{1.0000001, 1.0}));
  EXPECT_FALSE(b.contains(std::vector<double>{0.5}));
}

TEST(BoxDims, Scaled) {
  EXPECT_EQ(BoxDims({1, 2}).scaled(2.0), BoxDims({2, 4}));
}

TEST(UnitVector, ChecksNorm) {
  EXPECT_NO_THROW(UnitVector({0.6, 0.8}));
  EXPECT_THROW(UnitVector({0.6, 0.81}), std::invalid_argument);
  EXPECT_THROW(UnitVector({1.0}), std::invalid_argument);
}

TEST(UnitVector, Normalized) {
  const auto v = UnitVector::normalized({3.0, 4.0, 12.0});
  EXPECT_NEAR(v[0], 3.0 / 13.0, 1e-16);
  EXPECT_NEAR(v[2], 12.0 / 13.0, 1e-16);
  EXPECT_THROW(UnitVector::normalized({0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(UnitVector::normalized({NAN, 1.0}), std::invalid_argument);
}

TEST(TrajectoryConfig, Validate) {
  const BoxDims box({1, 2});
  TrajectoryConfig ok{{0.5, 0.5}, UnitVector({1.0, 0.0}), TotalDistance{1.0}};
  EXPECT_NO_THROW(ok.validate(box));
  TrajectoryConfig outside{{1.5, 0.5}, UnitVector({1.0, 0.0}), TotalDistance{1.0}};
  EXPECT_THROW(outside.validate(box), std::invalid_argument);
  TrajectoryConfig no_distance{{0.5, 0.5}, UnitVector({1.0, 0.0}),
                               TotalDistance{0.0}};
  EXPECT_THROW(no_distance.validate(box), std::invalid_argument);
  TrajectoryConfig no_bounces{{0.5, 0.5}, UnitVector({1.0, 0.0}), BounceCount{0}};
  EXPECT_THROW(no_bounces.validate(box), std::invalid_argument);
  TrajectoryConfig wrong_dim{{0.5, 0.5}, UnitVector({1.0, 0.0, 0.0}),
                             BounceCount{1}};
  EXPECT_THROW(wrong_dim.validate(box), std::invalid_argument);
}

TEST(SampleModel, StringRoundTrip) {
  for (auto m : {SampleModel::SpreadingSim, SampleModel::AbsorptionSim,
                 SampleModel::LineEnsemble}) {
    EXPECT_EQ(sample_model_from_string(to_string(m)), m);
  }
  EXPECT_THROW(sample_model_from_string("ballistic"), std::invalid_argument);
}

TEST(SampleSet, Mean) {
  SampleSet s;
  EXPECT_THROW(s.mean(), std::domain_error);
  s.lengths = {1.0, 2.0, 4.5};
  EXPECT_DOUBLE_EQ(s.mean(), 2.5);
}
