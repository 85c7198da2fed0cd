#include <random>

#include <gtest/gtest.h>

#include "hcomc/game_decision.hpp"

using namespace hcomc;

namespace {

SceneVehicle car(double x, double v) {
  SceneVehicle s;
  s.x = x;
  s.speed = v;
  return s;
}

PayoffMatrix random_matrix(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-5, 5);
  PayoffMatrix m;
  for (auto& a : m.sv_cost)
    for (auto& b : a)
      for (auto& c : b) c = u(rng);
  for (auto& a : m.fv_cost)
    for (auto& b : a)
      for (auto& c : b) c = u(rng);
  return m;
}

// No profitable unilateral deviation to any pure action.
bool is_equilibrium(const PayoffMatrix& m, FvStyle t, const MixedEquilibrium& e) {
  auto sv_value = [&](std::size_t i) {
    double s = 0;
    for (std::size_t j = 0; j < kFvActions; ++j)
      s += e.fv[j] * m.sv(static_cast<SvAction>(i), static_cast<FvAction>(j), t);
    return s;
  };
  auto fv_value = [&](std::size_t j) {
    double s = 0;
    for (std::size_t i = 0; i < kSvActions; ++i)
      s += e.sv[i] * m.fv(static_cast<SvAction>(i), static_cast<FvAction>(j), t);
    return s;
  };
  double sv_cost = 0, fv_cost = 0;
  for (std::size_t i = 0; i < kSvActions; ++i) sv_cost += e.sv[i] * sv_value(i);
  for (std::size_t j = 0; j < kFvActions; ++j) fv_cost += e.fv[j] * fv_value(j);
  for (std::size_t i = 0; i < kSvActions; ++i)
    if (sv_value(i) < sv_cost - 1e-7) return false;
  for (std::size_t j = 0; j < kFvActions; ++j)
    if (fv_value(j) < fv_cost - 1e-7) return false;
  return std::abs(sv_cost - e.sv_cost) < 1e-7 && std::abs(fv_cost - e.fv_cost) < 1e-7;
}

}  // namespace

TEST(Style, ScalesHeadwayAndAccel) {
  IdmParams base;
  EXPECT_LT(apply_style(base, FvStyle::Aggressive).safe_headway_Ts, base.safe_headway_Ts);
  EXPECT_GT(apply_style(base, FvStyle::Conservative).safe_headway_Ts, base.safe_headway_Ts);
  EXPECT_EQ(apply_style(base, FvStyle::Normal).max_accel_a, base.max_accel_a);
}

TEST(TypeDistribution, Validation) {
  FvTypeDistribution d;
  EXPECT_NO_THROW(d.validate());
  d.p = {0.5, 0.5, 0.5};
  EXPECT_THROW(d.validate(), std::invalid_argument);
  EXPECT_NO_THROW(FvTypeDistribution::point_mass(FvStyle::Aggressive).validate());
}

TEST(Rollout, CutInRightInFrontIsPenalised) {
  LocalScene s;
  s.sv = car(100, 25);
  s.sv.params.desired_speed_v0 = 25;
  s.fv = car(97, 25);
  GameParams g;
  const auto change = rollout(s, {SvAction::ChangeLane, FvAction::ConstantSpeed}, FvStyle::Normal, g);
  const auto keep = rollout(s, {SvAction::KeepFollowing, FvAction::ConstantSpeed}, FvStyle::Normal, g);
  EXPECT_TRUE(change.collision);
  EXPECT_GT(change.sv, keep.sv + g.collision_penalty * 0.5);
}

TEST(Rollout, DeterministicAndPayoffAgrees) {
  LocalScene s;
  s.sv = car(100, 22);
  s.sv_leader = car(130, 15);
  s.fv = car(60, 25);
  GameParams g;
  const ActionProfile p{SvAction::ChangeLane, FvAction::Decelerate};
  const auto a = rollout(s, p, FvStyle::Aggressive, g);
  const auto b = rollout(s, p, FvStyle::Aggressive, g);
  EXPECT_EQ(a.sv, b.sv);
  EXPECT_EQ(a.fv, b.fv);
  EXPECT_EQ(rollout_payoff(s, p, FvStyle::Aggressive, g), a.sv);
}

TEST(Stackelberg, EmptyTargetLaneWithSlowLeaderChangesLane) {
  LocalScene s;
  s.sv = car(100, 25);
  s.sv_leader = car(125, 12);
  GameParams g;
  EXPECT_EQ(sv_decide(s, FvTypeDistribution{}, g).sv_action, SvAction::ChangeLane);
}

TEST(Stackelberg, BlockedTargetLaneKeepsFollowing) {
  LocalScene s;
  s.sv = car(100, 25);
  s.sv_leader = car(140, 24);
  s.fv = car(99, 25);
  s.target_leader = car(104, 25);
  GameParams g;
  EXPECT_EQ(sv_decide(s, FvTypeDistribution{}, g).sv_action, SvAction::KeepFollowing);
}

TEST(Stackelberg, MatchesExpectedCostByHand) {
  std::mt19937_64 rng(4);
  for (int n = 0; n < 200; ++n) {
    const auto m = random_matrix(rng);
    FvTypeDistribution d;
    const auto dec = sv_decide(m, d);
    for (std::size_t s = 0; s < kSvActions; ++s) {
      double e = 0;
      for (std::size_t t = 0; t < kFvStyles; ++t) {
        std::size_t best = 0;
        for (std::size_t f = 1; f < kFvActions; ++f)
          if (m.fv_cost[s][f][t] < m.fv_cost[s][best][t]) best = f;
        e += d.p[t] * m.sv_cost[s][best][t];
      }
      EXPECT_NEAR(dec.expected_cost[s], e, 1e-12);
    }
    const bool change = dec.expected_cost[0] < dec.expected_cost[1];
    EXPECT_EQ(dec.sv_action, change ? SvAction::ChangeLane : SvAction::KeepFollowing);
  }
}

TEST(Stackelberg, TieKeepsFollowing) {
  PayoffMatrix m{};
  EXPECT_EQ(sv_decide(m, FvTypeDistribution{}).sv_action, SvAction::KeepFollowing);
  EXPECT_EQ(fv_best_response(m, SvAction::ChangeLane, FvStyle::Normal), FvAction::ChangeLane);
}

TEST(MixedEquilibria, EverySolutionIsAnEquilibrium) {
  std::mt19937_64 rng(5);
  int total = 0;
  for (int n = 0; n < 300; ++n) {
    const auto m = random_matrix(rng);
    for (auto t : {FvStyle::Aggressive, FvStyle::Normal, FvStyle::Conservative}) {
      const auto eqs = solve_mixed_equilibria(m, t);
      // Nondegenerate 2xn games always have an equilibrium with support of size <= 2.
      EXPECT_FALSE(eqs.empty());
      for (const auto& e : eqs) {
        ++total;
        EXPECT_TRUE(is_equilibrium(m, t, e));
      }
    }
  }
  EXPECT_GT(total, 900);
}

TEST(MixedEquilibria, MatchingPenniesIsMixed) {
  PayoffMatrix m{};
  const auto t = static_cast<std::size_t>(FvStyle::Normal);
  // SV wants to match, FV wants to mismatch, over FV actions 0 and 1; others dominated.
  m.sv_cost[0][0][t] = -1; m.sv_cost[0][1][t] = 1;
  m.sv_cost[1][0][t] = 1;  m.sv_cost[1][1][t] = -1;
  m.fv_cost[0][0][t] = 1;  m.fv_cost[0][1][t] = -1;
  m.fv_cost[1][0][t] = -1; m.fv_cost[1][1][t] = 1;
  for (std::size_t f = 2; f < kFvActions; ++f) {
    m.fv_cost[0][f][t] = m.fv_cost[1][f][t] = 10;
    m.sv_cost[0][f][t] = m.sv_cost[1][f][t] = 0;
  }
  const auto eqs = solve_mixed_equilibria(m, FvStyle::Normal);
  ASSERT_EQ(eqs.size(), 1u);
  EXPECT_NEAR(eqs[0].sv[0], 0.5, 1e-12);
  EXPECT_NEAR(eqs[0].fv[0], 0.5, 1e-12);
}

TEST(Stackelberg, ThreeTypeExpectation) {
  std::mt19937_64 rng(6);
  const auto m = random_matrix(rng);
  FvTypeDistribution d;
  d.p = {0.2, 0.5, 0.3};
  const auto dec = sv_decide(m, d);
  for (std::size_t s = 0; s < kSvActions; ++s) {
    double e = 0;
    for (std::size_t t = 0; t < kFvStyles; ++t) {
      double best_fv = 1e300, sv_cost = 0;
      for (std::size_t f = 0; f < kFvActions; ++f)
        if (m.fv_cost[s][f][t] < best_fv) {
          best_fv = m.fv_cost[s][f][t];
          sv_cost = m.sv_cost[s][f][t];
        }
      e += d.p[t] * sv_cost;
    }
    EXPECT_NEAR(dec.expected_cost[s], e, 1e-12);
  }
}

TEST(Stackelberg, InvariantUnderPositiveAffineMap) {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 100; ++n) {
    const auto m = random_matrix(rng);
    PayoffMatrix scaled = m;
    for (auto& a : scaled.sv_cost)
      for (auto& b : a)
        for (auto& c : b) c = 3.0 * c + 7.0;
    for (auto& a : scaled.fv_cost)
      for (auto& b : a)
        for (auto& c : b) c = 0.5 * c - 2.0;
    EXPECT_EQ(sv_decide(m, FvTypeDistribution{}).sv_action,
              sv_decide(scaled, FvTypeDistribution{}).sv_action);
  }
}

TEST(Stackelberg, PointMassMatchesEnumeration) {
  std::mt19937_64 rng(8);
  const auto m = random_matrix(rng);
  for (auto t : {FvStyle::Aggressive, FvStyle::Normal, FvStyle::Conservative}) {
    const auto dec = sv_decide(m, FvTypeDistribution::point_mass(t));
    double best = 1e300;
    SvAction arg = SvAction::KeepFollowing;
    for (auto s : {SvAction::KeepFollowing, SvAction::ChangeLane}) {
      const double c = m.sv(s, fv_best_response(m, s, t), t);
      if (c < best) {
        best = c;
        arg = s;
      }
    }
    EXPECT_EQ(dec.sv_action, arg);
  }
}

TEST(Rollout, SymmetricLanesCostTheSame) {
  // Identical slow leaders in both lanes and no one else: moving over gains nothing.
  LocalScene s;
  s.sv = car(100, 20);
  s.sv_leader = car(160, 20);
  s.target_leader = car(160, 20);
  GameParams g;
  const auto change = rollout(s, {SvAction::ChangeLane, FvAction::ConstantSpeed}, FvStyle::Normal, g);
  const auto keep = rollout(s, {SvAction::KeepFollowing, FvAction::ConstantSpeed}, FvStyle::Normal, g);
  EXPECT_NEAR(change.sv, keep.sv, 0.05);
}

TEST(Stackelberg, EmptyTargetBlockedCurrentAlwaysChanges) {
  // Only scenes the lane change can escape: at least 2 s to contact.
  GameParams g;
  for (double gap : {20.0, 30.0, 40.0, 60.0}) {
    for (double lead_v : {5.0, 10.0, 15.0}) {
      if ((gap - 5.0) / (22.0 - lead_v) < 2.0) continue;
      LocalScene s;
      s.sv = car(100, 22);
      s.sv_leader = car(100 + gap, lead_v);
      EXPECT_EQ(sv_decide(s, FvTypeDistribution{}, g).sv_action, SvAction::ChangeLane)
          << gap << " " << lead_v;
    }
  }
}
