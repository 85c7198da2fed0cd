#include <random>

#include <gtest/gtest.h>

#include "hcomc/objectives.hpp"
#include "support/oracles.hpp"

using namespace hcomc;

namespace {
constexpr double kUSafe = 2.243467024026036;
constexpr double kFuel20_1 = 0.0032667399999999997;
constexpr double kFuel20_0 = 0.0008282999999999999;

Trajectory profile(double t0, double t1, double dt, double v0, double a) {
  Trajectory tr;
  for (double t = t0; t <= t1 + 1e-9; t += dt) {
    TrajectoryPoint p;
    p.t = t;
    p.speed = v0 + a * (t - t0);
    p.accel = a;
    tr.points.push_back(p);
  }
  return tr;
}

MergePlan plan(double us, double uf, double ue, int tag) {
  MergePlan p;
  p.feasible = true;
  p.objectives = {us, uf, ue};
  p.decision.merge_end_time = 6.0 + 0.1 * tag;
  return p;
}
}  // namespace

TEST(USafe, MatchesFrozenValue) {
  EXPECT_NEAR(u_safe(25, 25, 114.21, SafetyParams{}), kUSafe, 1e-12);
}

TEST(USafe, ShortGapIsInfeasible) {
  EXPECT_THROW(u_safe(25, 5, 20, SafetyParams{}), InfeasibleGap);
}

TEST(USafe, MonotoneInGapAndSpeeds) {
  SafetyParams p;
  double prev = 1e300;
  for (double d = 40; d < 300; d += 1) {
    const double u = u_safe(25, 25, d, p);
    EXPECT_LT(u, prev);
    prev = u;
  }
  EXPECT_LT(u_safe(20, 25, 80, p), u_safe(25, 25, 80, p));
  EXPECT_GT(u_safe(25, 20, 80, p), u_safe(25, 25, 80, p));
}

TEST(SafetyParams, Validation) {
  SafetyParams p;
  p.delay_T = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Fuel, MatchesFrozenRates) {
  FuelModelParams p;
  EXPECT_NEAR(fuel_rate(20, 1, p), kFuel20_1, 1e-15);
  EXPECT_NEAR(fuel_rate(20, 0, p), kFuel20_0, 1e-15);
  EXPECT_NEAR(fuel_rate(20, -2, p), kFuel20_0, 1e-15);
}

TEST(Fuel, NeverNegative) {
  FuelModelParams p;
  p.Q = {-1, 0, 0, 0};
  EXPECT_EQ(fuel_rate(10, 0, p), 0.0);
}

TEST(Fuel, TrajectoryIntegralAdditive) {
  FuelModelParams p;
  const auto whole = profile(0, 10, 0.1, 10, 1.0);
  Trajectory first, second;
  first.points.assign(whole.points.begin(), whole.points.begin() + 41);
  second.points.assign(whole.points.begin() + 40, whole.points.end());
  EXPECT_NEAR(trajectory_fuel(whole, p),
              trajectory_fuel(first, p) + trajectory_fuel(second, p), 1e-15);
  EXPECT_NEAR(u_fuel(first, second, p), trajectory_fuel(whole, p), 1e-15);
}

TEST(Fuel, ConstantSpeedIntegral) {
  FuelModelParams p;
  EXPECT_NEAR(trajectory_fuel(profile(0, 10, 0.1, 20, 0), p), 10 * kFuel20_0, 1e-12);
}

TEST(Eff, LinearInEta) {
  MergeAccels before{0.2, 0.1, -0.3, 0.0};
  MergeAccels after{0.5, -0.4, -0.1, std::nullopt};
  const double base = u_eff(before, after, 0.0);
  EXPECT_NEAR(base, 0.3, 1e-15);
  const double slope = u_eff(before, after, 1.0) - base;
  EXPECT_NEAR(slope, -0.5 + 0.2, 1e-15);
  for (double eta : {0.25, 0.5, 0.9}) EXPECT_NEAR(u_eff(before, after, eta), base + eta * slope, 1e-15);
}

TEST(Select, EmptyThrows) {
  std::vector<MergePlan> none;
  EXPECT_THROW(select_unique(none), std::invalid_argument);
}

TEST(Select, AllUnsafePicksSmallestUSafe) {
  std::vector<MergePlan> s{plan(6, 0.01, 1, 0), plan(4.5, 0.09, -1, 1), plan(5, 0.02, 2, 2)};
  EXPECT_EQ(select_unique(s).objectives.u_safe, 4.5);
}

TEST(Select, SafeSubsetNormalised) {
  std::vector<MergePlan> s{plan(1, 0.04, 1.0, 0), plan(2, 0.05, 1.6, 1), plan(3.9, 0.06, 1.7, 2),
                           plan(9, 0.01, 5.0, 3)};
  // Scores: 0+1, 0.5+0.14, 1+0: the middle plan wins; the unsafe one is ignored.
  EXPECT_EQ(select_unique(s).decision, s[1].decision);
}

TEST(Select, InfeasibleIgnoredWhenFeasibleExists) {
  std::vector<MergePlan> s{plan(1, 0.04, 1.0, 0), plan(0.1, 0.0, 9.0, 1)};
  s[1].feasible = false;
  EXPECT_EQ(select_unique(s).decision, s[0].decision);
}

TEST(Select, MatchesHandRuleOnRandomSets) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> us(0.5, 8), uf(0.03, 0.06), ue(-2, 2);
  for (int n = 0; n < 200; ++n) {
    std::vector<MergePlan> s;
    const int size = 1 + n % 12;
    for (int i = 0; i < size; ++i) s.push_back(plan(us(rng), uf(rng), ue(rng), i));
    EXPECT_EQ(select_unique(s).decision, oracle::hand_select(s).decision);
  }
}

TEST(USafe, StandingRearVehicleNeedsNothing) {
  EXPECT_EQ(u_safe(0, 25, 10, SafetyParams{}), 0.0);
}

TEST(Fuel, IdleAndEmpty) {
  FuelModelParams p;
  EXPECT_EQ(fuel_rate(0, 0, p), p.Q[0]);
  Trajectory one = profile(0, 0, 0.1, 20, 0);
  EXPECT_EQ(u_fuel(one, Trajectory{}, p), 0.0);
}

TEST(Fuel, PiecewiseLinearAgainstDenseIntegration) {
  FuelModelParams p;
  // Speed 10 -> 20 over 5 s, then 20 -> 14 over 3 s.
  auto speed = [](double t) { return t <= 5 ? 10 + 2 * t : 20 - 2 * (t - 5); };
  // A sample carries the acceleration of the interval ending at it.
  auto accel = [](double t) { return t <= 5 + 1e-9 ? 2.0 : -2.0; };
  Trajectory tr;
  for (int k = 0; k <= 80; ++k) {
    const double t = 0.1 * k;
    TrajectoryPoint pt;
    pt.t = t;
    pt.speed = speed(t);
    pt.accel = accel(t);
    tr.points.push_back(pt);
  }
  double ref = 0;
  const double h = 0.001;
  for (int k = 0; k < 8000; ++k) {
    const double t = (k + 0.5) * h;
    ref += h * fuel_rate(speed(t), accel(t), p);
  }
  EXPECT_NEAR(trajectory_fuel(tr, p), ref, 1e-6 * ref);
}

TEST(Eff, WorkedExample) {
  MergeAccels before{0.0, 0.0, 0.0, 0.0};
  MergeAccels after{0.8, -0.2, -0.1, 0.0};
  EXPECT_NEAR(u_eff(before, after, 0.5), 0.65, 1e-15);
  EXPECT_EQ(u_eff(after, after, 0.5), 0.0);
  EXPECT_NEAR(u_eff(before, after, 0.0), 0.8, 1e-15);
}

TEST(Select, SingletonAndDegenerateDenominators) {
  std::vector<MergePlan> one{plan(3, 0.04, 1, 0)};
  EXPECT_EQ(select_unique(one).decision, one[0].decision);
  std::vector<MergePlan> same{plan(3, 0.04, 1, 0), plan(1.5, 0.04, 1, 1), plan(2, 0.04, 1, 2)};
  EXPECT_EQ(select_unique(same).objectives.u_safe, 1.5);
}

TEST(Select, FivePlanHandExample) {
  // Two plans exceed the threshold and drop out. Over the safe three, fuel
  // spans [0.04, 0.05] and -u_eff spans [-1.5, -0.5]; scores 1.0, 0.9, 1.0.
  std::vector<MergePlan> s{plan(2.0, 0.04, 0.5, 0), plan(4.5, 0.01, 3.0, 1),
                           plan(3.0, 0.045, 1.1, 2), plan(3.9, 0.05, 1.5, 3),
                           plan(7.0, 0.02, 2.0, 4)};
  EXPECT_EQ(select_unique(s).decision, s[2].decision);
  EXPECT_EQ(oracle::hand_select(s).decision, s[2].decision);
}
