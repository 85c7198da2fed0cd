#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hcomc/collision.hpp"
#include "support/oracles.hpp"

using namespace hcomc;

TEST(Footprint, CornersCounterClockwiseFromRearRight) {
  VehicleFootprint f{{10, 5}, 0.0, 4.0, 2.0};
  const auto c = f.corners();
  EXPECT_DOUBLE_EQ(c[0].x, 8);
  EXPECT_DOUBLE_EQ(c[0].y, 4);
  EXPECT_DOUBLE_EQ(c[1].x, 12);
  EXPECT_DOUBLE_EQ(c[2].y, 6);
  EXPECT_DOUBLE_EQ(c[3].x, 8);
}

TEST(Footprint, ContainsRespectsHeading) {
  VehicleFootprint f{{0, 0}, M_PI / 2, 4.0, 2.0};
  EXPECT_TRUE(f.contains({0, 1.9}));
  EXPECT_FALSE(f.contains({1.9, 0}));
}

TEST(Segments, QuickRejectAndStraddle) {
  Segment2D a{{0, 0}, {2, 2}}, b{{0, 2}, {2, 0}}, c{{3, 3}, {4, 4}}, d{{2, 2}, {3, 1}};
  EXPECT_TRUE(quick_reject(a, b));
  EXPECT_TRUE(straddle_intersect(a, b));
  EXPECT_FALSE(quick_reject(a, c));
  EXPECT_TRUE(straddle_intersect(a, d));  // shared endpoint
  Segment2D e{{0, 0}, {1, 0}}, f{{2, 0}, {3, 0}};
  EXPECT_FALSE(straddle_intersect(e, f));  // collinear, disjoint
  Segment2D g{{0.5, 0}, {3, 0}};
  EXPECT_TRUE(straddle_intersect(e, g));  // collinear overlap
}

TEST(Footprint, NestedRectanglesCollide) {
  VehicleFootprint big{{0, 0}, 0.3, 10, 6}, small{{0.2, 0.1}, 1.0, 2, 1};
  EXPECT_TRUE(footprints_collide(big, small));
  EXPECT_TRUE(footprints_collide(small, big));
}

TEST(Footprint, TouchingCounts) {
  VehicleFootprint a{{0, 0}, 0, 4, 2}, b{{4, 0}, 0, 4, 2};
  EXPECT_TRUE(footprints_collide(a, b));
  b.center.x = 4.001;
  EXPECT_FALSE(footprints_collide(a, b));
}

TEST(Footprint, AgreesWithSeparatingAxisOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(-6, 6), ang(-M_PI, M_PI), len(1, 6), wid(0.5, 3);
  int hits = 0;
  for (int i = 0; i < 3000; ++i) {
    oracle::Rect a{pos(rng), pos(rng), ang(rng), len(rng), wid(rng)};
    oracle::Rect b{pos(rng), pos(rng), ang(rng), len(rng), wid(rng)};
    const bool expect = oracle::sat_overlap(a, b);
    hits += expect;
    ASSERT_EQ(footprints_collide(oracle::to_footprint(a), oracle::to_footprint(b)), expect)
        << "pair " << i;
  }
  EXPECT_GT(hits, 300);
  EXPECT_LT(hits, 2700);
}

TEST(Footprint, SymmetricInArguments) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pos(-5, 5), ang(-M_PI, M_PI);
  for (int i = 0; i < 1000; ++i) {
    VehicleFootprint a{{pos(rng), pos(rng)}, ang(rng), 5, 2};
    VehicleFootprint b{{pos(rng), pos(rng)}, ang(rng), 4, 1.8};
    EXPECT_EQ(footprints_collide(a, b), footprints_collide(b, a));
  }
}

TEST(Trajectories, RearEndTimeMatchesKinematics) {
  // Gap of 20 m between centers, 5 m cars, closing at 5 m/s: contact at t = 3.
  oracle::Motion a{0, 0, 25, 0, 0, 0, 5, 2};
  oracle::Motion b{20, 0, 20, 0, 0, 0, 5, 2};
  const auto t = trajectories_collide(a.sample(6, 0.1), b.sample(6, 0.1));
  ASSERT_TRUE(t.has_value());
  EXPECT_NEAR(*t, 3.0, 0.1 + 1e-9);
}

TEST(Trajectories, ParallelLanesNeverCollide) {
  oracle::Motion a{0, 0, 25, 0, 0, 0, 5, 2};
  oracle::Motion b{0, 3.75, 25, 0, 0, 0, 5, 2};
  EXPECT_FALSE(trajectories_collide(a.sample(10, 0.1), b.sample(10, 0.1)).has_value());
}

TEST(Trajectories, OffsetTimebaseAligned) {
  oracle::Motion a{0, 0, 25, 0, 0, 0, 5, 2};
  auto ta = a.sample(6, 0.1);
  auto tb = ta;
  // Same motion starting two steps later: overlap from its first sample.
  tb.points.erase(tb.points.begin(), tb.points.begin() + 2);
  const auto t = trajectories_collide(ta, tb);
  ASSERT_TRUE(t.has_value());
  EXPECT_NEAR(*t, 0.2, 1e-9);
}

TEST(Trajectories, MismatchedSpacingThrows) {
  oracle::Motion a{0, 0, 25, 0, 0, 0, 5, 2};
  EXPECT_THROW(trajectories_collide(a.sample(2, 0.1), a.sample(2, 0.2)), std::invalid_argument);
  auto shifted = a.sample(2, 0.1);
  for (auto& p : shifted.points) p.t += 0.05;
  EXPECT_THROW(trajectories_collide(a.sample(2, 0.1), shifted), std::invalid_argument);
}

TEST(Trajectories, AgreeWithDenseOracleOnCorpus) {
  const auto corpus = oracle::encounter_corpus(50, 21, 0.001);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& s = corpus[i];
    const auto dense = oracle::dense_first_overlap(s, 0.001);
    const auto coarse = trajectories_collide(s.a.sample(s.t_end, 0.1), s.b.sample(s.t_end, 0.1));
    ASSERT_EQ(coarse.has_value(), dense.has_value()) << "scenario " << i;
    if (coarse) EXPECT_NEAR(*coarse, *dense, 0.1 + 1e-9) << "scenario " << i;
  }
}

TEST(MergeGap, ClassifiesByFinalOrder) {
  // VR merges into lane 1 ahead of VMC, or between VMC and VMR.
  oracle::Motion vmc{0, 3.75, 25, 0, 0, 0, 5, 2};
  oracle::Motion vmr{-40, 3.75, 25, 0, 0, 0, 5, 2};
  oracle::Motion vr_ahead{20, 0, 25, 0.75, 0, 0, 5, 2};
  oracle::Motion vr_between{-20, 0, 25, 0.75, 0, 0, 5, 2};
  const double te = 5.0, dt = 0.1;
  EXPECT_EQ(classify_merge_gap(vr_ahead.sample(te, dt), vmc.sample(te, dt), vmr.sample(te, dt)),
            MergeSequence::AheadOfVmc);
  EXPECT_EQ(classify_merge_gap(vr_between.sample(te, dt), vmc.sample(te, dt), vmr.sample(te, dt)),
            MergeSequence::BetweenVmcAndVmr);
  oracle::Motion vr_into_vmc{2, 0, 25, 0.75, 0, 0, 5, 2};
  EXPECT_EQ(classify_merge_gap(vr_into_vmc.sample(te, dt), vmc.sample(te, dt), vmr.sample(te, dt)),
            MergeSequence::Infeasible);
}
