#include "hcomc/game_decision.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hcomc/collision.hpp"

namespace hcomc {

IdmParams apply_style(const IdmParams& base, FvStyle style) {
  IdmParams p = base;
  switch (style) {
    case FvStyle::Aggressive:
      p.safe_headway_Ts *= 0.7;
      p.max_accel_a *= 1.3;
      break;
    case FvStyle::Conservative:
      p.safe_headway_Ts *= 1.4;
      p.max_accel_a *= 0.8;
      break;
    case FvStyle::Normal:
      break;
  }
  return p;
}

FvTypeDistribution FvTypeDistribution::point_mass(FvStyle style) {
  FvTypeDistribution d;
  d.p = {0.0, 0.0, 0.0};
  d.p[static_cast<std::size_t>(style)] = 1.0;
  return d;
}

void FvTypeDistribution::validate() const {
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.0 || v > 1.0) throw std::invalid_argument("FvTypeDistribution: p outside [0,1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("FvTypeDistribution: probabilities must sum to 1");
  }
}

double PayoffMatrix::sv(SvAction s, FvAction f, FvStyle t) const {
  return sv_cost[static_cast<std::size_t>(s)][static_cast<std::size_t>(f)]
                [static_cast<std::size_t>(t)];
}

double PayoffMatrix::fv(SvAction s, FvAction f, FvStyle t) const {
  return fv_cost[static_cast<std::size_t>(s)][static_cast<std::size_t>(f)]
                [static_cast<std::size_t>(t)];
}

namespace {

constexpr double kFreeGap = 1e9;

enum Slot { kSv, kSvLeader, kSvFollower, kFv, kTargetLeader, kFvFollower, kSlots };

struct Body {
  bool present = false;
  double x = 0.0;
  double y = 0.0;
  double v = 0.0;
  double a = 0.0;
  double length = 5.0;
  double width = 2.0;
  IdmParams params;
  std::optional<LaneChangePoly> lateral;  // active lateral move
  double lateral_base_y = 0.0;
};

struct Leader {
  double gap = kFreeGap;
  double speed = 0.0;
};

// Nearest vehicle ahead sharing the lateral lane band.
Leader find_leader(const std::array<Body, kSlots>& bodies, int self, double lane_half) {
  const Body& me = bodies[self];
  Leader best;
  for (int i = 0; i < kSlots; ++i) {
    const Body& o = bodies[i];
    if (i == self || !o.present || o.x <= me.x) continue;
    if (std::abs(o.y - me.y) >= lane_half) continue;
    const double gap = o.x - me.x - 0.5 * (o.length + me.length);
    if (gap < best.gap) best = {gap, o.v};
  }
  return best;
}

double model_accel(const Body& b, const Leader& l) {
  if (l.gap >= kFreeGap) return idm_accel(kFreeGap, b.v, 0.0, b.params);
  if (l.gap <= 0.0) return -b.params.emergency_decel;
  return idm_accel(l.gap, b.v, b.v - l.speed, b.params);
}

Body make_body(const std::optional<SceneVehicle>& v, double y) {
  Body b;
  if (!v) return b;
  b.present = true;
  b.x = v->x;
  b.y = y;
  b.v = v->speed;
  b.length = v->length;
  b.width = v->width;
  b.params = v->params;
  return b;
}

}  // namespace

RolloutCosts rollout(const LocalScene& scene, const ActionProfile& profile, FvStyle style,
                     const GameParams& params) {
  const double y_cur = scene.current_lane_y;
  const double y_tgt = scene.target_lane_y;
  const double lane_half = 0.5 * std::abs(y_tgt - y_cur);

  std::array<Body, kSlots> bodies;
  bodies[kSv] = make_body(scene.sv, y_cur);
  bodies[kSvLeader] = make_body(scene.sv_leader, y_cur);
  bodies[kSvFollower] = make_body(scene.sv_follower, y_cur);
  bodies[kFv] = make_body(scene.fv, y_tgt);
  bodies[kTargetLeader] = make_body(scene.target_leader, y_tgt);
  bodies[kFvFollower] = make_body(scene.fv_follower, y_tgt);
  if (bodies[kFv].present) bodies[kFv].params = apply_style(bodies[kFv].params, style);

  const double horizon = params.horizon;
  auto start_lateral = [&](Body& b, double to_y) {
    const double span = std::max(b.v * horizon, 1.0);
    b.lateral = fit_quintic(b.x, b.x + span, to_y - b.y);
    b.lateral_base_y = b.y;
  };
  if (profile.sv_action == SvAction::ChangeLane) start_lateral(bodies[kSv], y_tgt);
  if (bodies[kFv].present && profile.fv_action == FvAction::ChangeLane) {
    start_lateral(bodies[kFv], y_cur);
  }

  // Model accelerations before the manoeuvre, for the incentive term.
  std::array<double, kSlots> a_before{};
  for (int i = 0; i < kSlots; ++i) {
    if (bodies[i].present) a_before[i] = model_accel(bodies[i], find_leader(bodies, i, lane_half));
  }

  const auto fv_params = bodies[kFv].params;
  double sv_sq = 0.0, fv_sq = 0.0;
  bool sv_hit = false, fv_hit = false;
  const auto steps = static_cast<int>(std::lround(horizon / params.dt));

  for (int k = 0; k < steps; ++k) {
    std::array<double, kSlots> accel{};
    for (int i = 0; i < kSlots; ++i) {
      Body& b = bodies[i];
      if (!b.present) continue;
      if (i == kSvLeader || i == kTargetLeader) {
        accel[i] = 0.0;  // outer leaders hold their speed
      } else if (i == kFv && profile.fv_action != FvAction::ChangeLane) {
        switch (profile.fv_action) {
          case FvAction::ConstantSpeed: accel[i] = 0.0; break;
          case FvAction::Accelerate: accel[i] = params.fv_accel_fraction * fv_params.max_accel_a; break;
          case FvAction::Decelerate: accel[i] = -params.fv_decel_fraction * fv_params.comfort_decel_b; break;
          default: break;
        }
      } else {
        accel[i] = model_accel(b, find_leader(bodies, i, lane_half));
      }
    }
    for (int i = 0; i < kSlots; ++i) {
      Body& b = bodies[i];
      if (!b.present) continue;
      const double v_next = std::max(0.0, b.v + accel[i] * params.dt);
      b.a = (v_next - b.v) / params.dt;
      b.v = v_next;
      b.x += b.v * params.dt;
      if (b.lateral) b.y = b.lateral_base_y + b.lateral->y_clamped(b.x);
    }
    sv_sq += bodies[kSv].a * bodies[kSv].a;
    if (bodies[kFv].present) fv_sq += bodies[kFv].a * bodies[kFv].a;

    for (int i = 0; i < kSlots; ++i) {
      for (int j = i + 1; j < kSlots; ++j) {
        if (!bodies[i].present || !bodies[j].present) continue;
        const VehicleFootprint fi{{bodies[i].x, bodies[i].y}, 0.0, bodies[i].length, bodies[i].width};
        const VehicleFootprint fj{{bodies[j].x, bodies[j].y}, 0.0, bodies[j].length, bodies[j].width};
        if (footprints_collide(fi, fj)) {
          sv_hit = sv_hit || i == kSv || j == kSv;
          fv_hit = fv_hit || i == kFv || j == kFv;
        }
      }
    }
  }

  // Critical acceleration of `rear` behind `front` at the horizon.
  auto critical = [&](int rear, int front_gap_owner, const Leader& l) {
    (void)front_gap_owner;
    if (l.gap >= kFreeGap) return 0.0;
    try {
      return u_safe(bodies[rear].v, l.speed, std::max(l.gap, 0.0), params.safety);
    } catch (const InfeasibleGap&) {
      return params.collision_penalty;
    }
  };

  RolloutCosts out;
  out.collision = sv_hit || fv_hit;

  // Subject vehicle.
  {
    double safety = sv_hit ? params.collision_penalty : 0.0;
    const Leader lead = find_leader(bodies, kSv, lane_half);
    double worst = critical(kSv, kSv, lead);
    for (int i = 0; i < kSlots; ++i) {
      if (i == kSv || !bodies[i].present) continue;
      const Leader li = find_leader(bodies, i, lane_half);
      const double gap_to_sv = bodies[kSv].x - bodies[i].x -
                               0.5 * (bodies[kSv].length + bodies[i].length);
      if (bodies[kSv].x > bodies[i].x && li.gap == gap_to_sv) {
        worst = std::max(worst, critical(i, kSv, li));
      }
    }
    safety += worst;
    double incentive = model_accel(bodies[kSv], lead) - a_before[kSv];
    for (int i : {static_cast<int>(kSvFollower), static_cast<int>(kFv)}) {
      if (!bodies[i].present) continue;
      incentive += params.politeness_eta *
                   (model_accel(bodies[i], find_leader(bodies, i, lane_half)) - a_before[i]);
    }
    out.sv = params.w_safe * safety - params.w_eff * incentive +
             params.w_comf * sv_sq / std::max(steps, 1);
  }

  // Follower in the target lane.
  if (bodies[kFv].present) {
    const Leader lead = find_leader(bodies, kFv, lane_half);
    const double safety = (fv_hit ? params.collision_penalty : 0.0) + critical(kFv, kFv, lead);
    const double incentive = model_accel(bodies[kFv], lead) - a_before[kFv];
    out.fv = params.w_safe * safety - params.w_eff * incentive +
             params.w_comf * fv_sq / std::max(steps, 1);
  }
  return out;
}

double rollout_payoff(const LocalScene& scene, const ActionProfile& profile, FvStyle style,
                      const GameParams& params) {
  return rollout(scene, profile, style, params).sv;
}

PayoffMatrix build_payoff_matrix(const LocalScene& scene, const GameParams& params) {
  PayoffMatrix m;
  for (std::size_t s = 0; s < kSvActions; ++s) {
    for (std::size_t f = 0; f < kFvActions; ++f) {
      for (std::size_t t = 0; t < kFvStyles; ++t) {
        const ActionProfile profile{static_cast<SvAction>(s), static_cast<FvAction>(f)};
        const auto costs = rollout(scene, profile, static_cast<FvStyle>(t), params);
        m.sv_cost[s][f][t] = costs.sv;
        m.fv_cost[s][f][t] = costs.fv;
      }
    }
  }
  return m;
}

FvAction fv_best_response(const PayoffMatrix& payoff, SvAction sv, FvStyle style) {
  std::size_t best = 0;
  for (std::size_t f = 1; f < kFvActions; ++f) {
    if (payoff.fv(sv, static_cast<FvAction>(f), style) <
        payoff.fv(sv, static_cast<FvAction>(best), style)) {
      best = f;
    }
  }
  return static_cast<FvAction>(best);
}

StackelbergDecision sv_decide(const PayoffMatrix& payoff, const FvTypeDistribution& dist) {
  dist.validate();
  StackelbergDecision out;
  std::array<std::array<FvAction, kFvStyles>, kSvActions> responses{};
  for (std::size_t s = 0; s < kSvActions; ++s) {
    const auto sv = static_cast<SvAction>(s);
    double expected = 0.0;
    for (std::size_t t = 0; t < kFvStyles; ++t) {
      const auto style = static_cast<FvStyle>(t);
      responses[s][t] = fv_best_response(payoff, sv, style);
      expected += dist.p[t] * payoff.sv(sv, responses[s][t], style);
    }
    out.expected_cost[s] = expected;
  }
  const auto change = static_cast<std::size_t>(SvAction::ChangeLane);
  const auto keep = static_cast<std::size_t>(SvAction::KeepFollowing);
  out.sv_action = out.expected_cost[change] < out.expected_cost[keep] ? SvAction::ChangeLane
                                                                      : SvAction::KeepFollowing;
  out.fv_response = responses[static_cast<std::size_t>(out.sv_action)];
  return out;
}

StackelbergDecision sv_decide(const LocalScene& scene, const FvTypeDistribution& dist,
                              const GameParams& params) {
  return sv_decide(build_payoff_matrix(scene, params), dist);
}

std::vector<MixedEquilibrium> solve_mixed_equilibria(const PayoffMatrix& payoff,
                                                     FvStyle style) {
  const auto t = static_cast<std::size_t>(style);
  auto A = [&](std::size_t i, std::size_t j) { return payoff.sv_cost[i][j][t]; };
  auto B = [&](std::size_t i, std::size_t j) { return payoff.fv_cost[i][j][t]; };
  constexpr double kTol = 1e-12;
  std::vector<MixedEquilibrium> found;

  // Pure profiles: both players at a best response (costs are minimised).
  for (std::size_t i = 0; i < kSvActions; ++i) {
    for (std::size_t j = 0; j < kFvActions; ++j) {
      bool ok = A(i, j) <= A(1 - i, j) + kTol;
      for (std::size_t k = 0; k < kFvActions && ok; ++k) ok = B(i, j) <= B(i, k) + kTol;
      if (!ok) continue;
      MixedEquilibrium e;
      e.sv[i] = 1.0;
      e.fv[j] = 1.0;
      e.sv_cost = A(i, j);
      e.fv_cost = B(i, j);
      found.push_back(e);
    }
  }

  // SV mixes both actions, FV mixes a pair {j1, j2}.
  for (std::size_t j1 = 0; j1 < kFvActions; ++j1) {
    for (std::size_t j2 = j1 + 1; j2 < kFvActions; ++j2) {
      // p = P(SV plays action 0) making FV indifferent between j1 and j2.
      const double fv_den = (B(0, j1) - B(1, j1)) - (B(0, j2) - B(1, j2));
      // q = P(FV plays j1) making SV indifferent between its actions.
      const double sv_den = (A(0, j1) - A(0, j2)) - (A(1, j1) - A(1, j2));
      if (std::abs(fv_den) < kTol || std::abs(sv_den) < kTol) continue;
      const double p = (B(1, j2) - B(1, j1)) / fv_den;
      const double q = (A(1, j2) - A(0, j2)) / sv_den;
      if (p <= kTol || p >= 1.0 - kTol || q <= kTol || q >= 1.0 - kTol) continue;
      const double fv_value = p * B(0, j1) + (1 - p) * B(1, j1);
      bool ok = true;
      for (std::size_t k = 0; k < kFvActions && ok; ++k) {
        ok = p * B(0, k) + (1 - p) * B(1, k) >= fv_value - 1e-9;
      }
      if (!ok) continue;
      MixedEquilibrium e;
      e.sv = {p, 1.0 - p};
      e.fv[j1] = q;
      e.fv[j2] = 1.0 - q;
      e.sv_cost = q * A(0, j1) + (1 - q) * A(0, j2);
      e.fv_cost = fv_value;
      found.push_back(e);
    }
  }
  return found;
}

}  // namespace hcomc
