#include "hcomc/merge_scene.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hcomc/collision.hpp"

namespace hcomc {

namespace {

double desired_gap(const IdmParams& p, double v) { return p.min_gap_s0 + v * p.safe_headway_Ts; }

// Smallest gap at which an IDM follower matching its leader's speed brakes
// no harder than `brake`.
double braking_gap(const IdmParams& p, double v, double brake) {
  const double free = 1.0 - std::pow(v / p.desired_speed_v0, p.accel_exponent_delta);
  return desired_gap(p, v) / std::sqrt(std::max(1e-9, free + brake / p.max_accel_a));
}

void check_bounds(const CubicMotion& m, const AccelBounds& b, const char* what) {
  if (m.peak_accel() > b.max_accel + 1e-9 || m.min_accel() < -b.max_decel - 1e-9) {
    std::ostringstream msg;
    msg << what << ": acceleration leaves [" << -b.max_decel << ", " << b.max_accel << "]";
    throw InfeasiblePlan(msg.str());
  }
  // The speed is quadratic in time; check its interior extremum.
  const auto& c = m.coeffs;
  double v_min = std::min(m.speed(m.t_begin), m.speed(m.t_end));
  if (c[3] != 0.0) {
    const double s = -c[2] / (3.0 * c[3]);
    if (s > 0.0 && s < m.t_end - m.t_begin) v_min = std::min(v_min, m.speed(m.t_begin + s));
  }
  if (v_min < -1e-9) throw InfeasiblePlan(std::string(what) + ": reference reverses");
}

TrajectoryPoint sample(const World& w, int id) {
  const auto& s = w.vehicles[id].state;
  return {w.t, s.x, s.y, s.speed, s.accel, s.heading, 0.0, 0.0};
}

void record(const World& w, int id, Trajectory& traj) {
  if (id < 0) return;
  traj.points.push_back(sample(w, id));
  traj.length = w.vehicles[id].state.length;
  traj.width = w.vehicles[id].state.width;
}

std::optional<double> accel_of(const World& w, int id) {
  if (id < 0) return std::nullopt;
  return nominal_accel(w.vehicles[id], find_leader(w, id));
}

}  // namespace

MergeTarget merge_target(const World& w, GapChoice gap, VmcMode mode, double tf) {
  const auto& r = w.roles;
  const bool ahead = gap == GapChoice::AheadOfVmc;
  int front = ahead ? r.vmf : r.vmc;
  int rear = ahead ? r.vmc : r.vmr;
  const double tau = tf - w.t;
  const auto& vr = w.vr().state;
  auto predicted = [&](int id) {
    const auto& s = w.vehicles[id].state;
    return s.x + s.speed * tau;
  };
  auto is_cav = [&](int id) { return id >= 0 && w.vehicles[id].state.kind == VehicleKind::CAV; };

  // Cooperation reshapes the slot: a yielding CAV drops out as a rear bound
  // (its virtual-vehicle plan checks that it can make room), and a VMC moving
  // to lane 2 leaves VMF..VMR with VMC's old position only fixing the order.
  double order_lo = -1e18;
  double order_hi = 1e18;
  if (mode == VmcMode::LongitudinalCooperation) {
    rear = -1;
  } else if (mode == VmcMode::LateralCooperation && r.vmc >= 0) {
    front = r.vmf;
    rear = is_cav(r.vmr) ? -1 : r.vmr;
    (ahead ? order_lo : order_hi) = predicted(r.vmc);
  }

  MergeTarget out;
  out.t = tf;
  out.v = front >= 0 ? w.vehicles[front].state.speed
                     : rear >= 0 ? w.vehicles[rear].state.speed : vr.speed;

  // Usable part of the slot: neither VR nor the vehicle behind it brakes
  // harder than the limit.
  const double brake = w.cfg->planner.slot_brake_limit;
  const auto& vr_idm = w.vr().idm;
  double lo = order_lo;
  double hi = order_hi;
  double preferred = hi;
  if (front >= 0) {
    const auto& f = w.vehicles[front].state;
    const double x_f = predicted(front) - 0.5 * (f.length + vr.length);
    hi = std::min(hi, x_f - braking_gap(vr_idm, out.v, brake));
    preferred = x_f - desired_gap(vr_idm, out.v);
  }
  if (rear >= 0) {
    const auto& b = w.vehicles[rear].state;
    lo = std::max(lo, predicted(rear) + 0.5 * (b.length + vr.length) +
                          braking_gap(w.vehicles[rear].idm, b.speed, brake));
  }
  // Aim one desired gap behind the front vehicle: the largest gap to the
  // new follower that is still comfortable ahead.
  double aim = vr.x + vr.speed * tau;
  if (front >= 0) {
    aim = lo <= hi ? std::clamp(preferred, lo, hi) : 0.5 * (lo + hi);
  } else if (rear >= 0) {
    aim = lo;
  }
  aim = std::clamp(aim, order_lo, order_hi);

  // End positions a cubic can reach with the end speed fixed and the
  // (linear) acceleration inside the bounds at both ends.
  const auto b = w.cfg->plan_bounds();
  const double s = 2.0 * (out.v - vr.speed) / tau;
  const double a0_lo = std::max(-b.max_decel, s - b.max_accel);
  const double a0_hi = std::min(b.max_accel, s + b.max_decel);
  if (a0_lo > a0_hi) throw InfeasiblePlan("target speed unreachable within the horizon");
  auto reach = [&](double a0) { return vr.x + vr.speed * tau + tau * tau * (a0 + s) / 6.0; };
  const double x_lo = std::max(lo <= hi ? lo : aim, reach(a0_lo));
  const double x_hi = std::min(lo <= hi ? hi : aim, reach(a0_hi));
  if (x_lo > x_hi) throw InfeasiblePlan("safe part of the slot is out of reach");
  out.x = std::clamp(aim, x_lo, x_hi);
  return out;
}

InstalledPlan install_merge_plan(World& w, const DecisionVector& d) {
  const auto& cfg = *w.cfg;
  const auto& road = cfg.road;
  const auto& pl = cfg.planner;
  const auto& r = w.roles;

  InstalledPlan plan;
  plan.decision = d;
  plan.t0 = w.t;
  plan.tf = w.t + d.merge_end_time;
  if (d.gap == GapChoice::BehindVmc && r.vmc < 0) {
    throw InfeasiblePlan("no VMC to merge behind");
  }
  plan.target = merge_target(w, d.gap, d.vmc_mode, plan.tf);

  SimVehicle& vr = w.vr();
  if (vr.state.lane != Lane::Ramp || vr.lateral) throw InfeasiblePlan("VR is not on the ramp");
  try {
    plan.vr_reference = solve_cubic_bvp(vr.state.x, vr.state.speed, plan.target.x,
                                        plan.target.v, plan.t0, plan.tf);
  } catch (const IllConditionedHorizon& e) {
    throw InfeasiblePlan(e.what());
  }
  check_bounds(plan.vr_reference, cfg.plan_bounds(), "VR reference");

  const double t_lc = plan.tf - pl.vr_lane_change_time;
  if (t_lc < plan.t0) throw InfeasiblePlan("merge horizon shorter than the lane change");
  const double x_lc = plan.vr_reference.position(t_lc);
  if (x_lc < road.ramp_merge_start_x || plan.target.x > road.ramp_merge_end_x ||
      !(plan.target.x > x_lc)) {
    throw InfeasiblePlan("lane change outside the acceleration lane");
  }
  plan.vr_lane_change = fit_quintic(x_lc, plan.target.x, road.main1_y - vr.state.y);

  // VMC clears lane 1 by the time VR starts its own lane change.
  const double vmc_change = std::max(pl.vmc_lane_change_time, t_lc - plan.t0);

  auto require_cav = [&](int id, const char* who) {
    if (id < 0) throw InfeasiblePlan(std::string("no ") + who + " to cooperate");
    if (w.vehicles[id].state.kind != VehicleKind::CAV) {
      throw InfeasiblePlan(std::string(who) + " is human-driven and cannot cooperate");
    }
  };

  // Lane-1 virtual vehicle: from the yielder's current leader to VR's target.
  auto install_lane1_virtual = [&](int yielder) {
    const auto& y = w.vehicles[yielder].state;
    const int lead = find_leader_in_lane(w, yielder, Lane::Main1);
    KinematicState start{y.x + y.length + desired_gap(w.vehicles[yielder].idm, y.speed), y.speed};
    if (lead >= 0) start = {w.vehicles[lead].state.x, w.vehicles[lead].state.speed};
    plan.lane1_virtual = plan_longitudinal_vr(start, plan.t0, {plan.target.x, plan.target.v},
                                              plan.tf, cfg.plan_bounds());
    plan.yielder = yielder;
  };

  switch (d.vmc_mode) {
    case VmcMode::NoCooperation:
      break;
    case VmcMode::LongitudinalCooperation: {
      const int yielder = d.gap == GapChoice::AheadOfVmc ? r.vmc : r.vmr;
      require_cav(yielder, d.gap == GapChoice::AheadOfVmc ? "VMC" : "VMR");
      install_lane1_virtual(yielder);
      break;
    }
    case VmcMode::LateralCooperation: {
      require_cav(r.vmc, "VMC");
      if (r.vmr >= 0 && w.vehicles[r.vmr].state.kind == VehicleKind::CAV) {
        install_lane1_virtual(r.vmr);
      }
      const auto& vmc = w.vehicles[r.vmc].state;
      const double t_end = plan.t0 + vmc_change;
      if (r.vnr >= 0 && r.vnf >= 0 && w.vehicles[r.vnr].state.kind == VehicleKind::CAV) {
        const auto& vnf = w.vehicles[r.vnf].state;
        plan.lane2_virtual = plan_lateral_vmc({vnf.x, vnf.speed}, plan.t0,
                                              {vmc.x + vmc.speed * vmc_change, vmc.speed}, t_end,
                                              cfg.plan_bounds());
      }
      break;
    }
  }

  // Everything validated; write into the world.
  vr.track = plan.vr_reference;
  vr.lateral = LateralManeuver{plan.vr_lane_change, vr.state.y, Lane::Ramp, Lane::Main1};
  vr.ramp_end_obstacle = false;
  vr.projected_leader.reset();
  if (plan.lane1_virtual) {
    w.vehicles[plan.yielder].virtual_leader =
        VirtualLeader{*plan.lane1_virtual, r.vr, Lane::Main1, 10.0};
  }
  if (d.vmc_mode == VmcMode::LateralCooperation) {
    const double t_end = plan.t0 + vmc_change;
    const int old_leader = find_leader_in_lane(w, r.vmc, Lane::Main1);
    start_lane_change(w, r.vmc, Lane::Main2, vmc_change);
    w.vehicles[r.vmc].handover =
        LeaderHandover{TransitionBlend::calibrate(plan.t0, t_end), old_leader, r.vnf};
    if (plan.lane2_virtual) {
      w.vehicles[r.vnr].virtual_leader =
          VirtualLeader{*plan.lane2_virtual, r.vmc, Lane::Main2, 10.0};
    }
  }
  return plan;
}

MergeAccels key_accels(const World& w) {
  const auto& r = w.roles;
  MergeAccels a;
  a.vr = *accel_of(w, r.vr);
  a.vmc = accel_of(w, r.vmc);
  a.vnr = accel_of(w, r.vnr);
  a.vmr = accel_of(w, r.vmr);
  return a;
}

EvaluationDetail evaluate_detailed(const World& snapshot, const DecisionVector& decision) {
  EvaluationDetail out;
  out.plan.decision = decision;
  out.plan.objectives = penalty_objectives();
  out.plan.feasible = false;

  World w = snapshot;
  const auto& cfg = *w.cfg;
  const auto& r = w.roles;
  InstalledPlan plan;
  try {
    plan = install_merge_plan(w, decision);
  } catch (const InfeasiblePlan& e) {
    out.reason = e.what();
    return out;
  }
  out.before = key_accels(snapshot);
  record(w, r.vr, out.vr);
  record(w, r.vmc, out.vmc);
  record(w, r.vmr, out.vmr);

  std::size_t merge_index = 0;
  double u_safe_value = 0.0;
  const double deadline = plan.tf + cfg.planner.no_merge_slack;
  w.merge_time.reset();
  while (true) {
    step(w);
    record(w, r.vr, out.vr);
    record(w, r.vmc, out.vmc);
    record(w, r.vmr, out.vmr);
    if (w.collision) {
      out.reason = "collision";
      return out;
    }
    if (w.merge_time && !out.merge_time) {
      out.merge_time = w.merge_time;
      merge_index = out.vr.points.size();
      out.after = key_accels(w);
      const auto& v = w.vr().state;
      const int f = find_follower_in_lane(w, r.vr, Lane::Main1);
      if (f >= 0) {
        const auto& fs = w.vehicles[f].state;
        const double gap = v.x - fs.x - 0.5 * (v.length + fs.length);
        out.d_cri = gap;
        try {
          u_safe_value = u_safe(fs.speed, v.speed, gap, cfg.safety);
        } catch (const InfeasibleGap& e) {
          out.reason = e.what();
          return out;
        }
      }
    }
    if (out.merge_time && w.t >= *out.merge_time + cfg.planner.eval_tail - 1e-9) break;
    if (!out.merge_time && w.t > deadline) {
      out.reason = "no merge";
      return out;
    }
  }

  const auto seq = classify_merge_gap(out.vr, out.vmc, out.vmr);
  const auto wanted = decision.gap == GapChoice::AheadOfVmc ? MergeSequence::AheadOfVmc
                                                            : MergeSequence::BetweenVmcAndVmr;
  if (seq != wanted) {
    out.reason = "merge sequence differs from the chosen gap";
    return out;
  }

  auto head = [&](const Trajectory& t) {
    Trajectory h = t;
    if (h.points.size() > merge_index) h.points.resize(merge_index);
    return h;
  };
  out.plan.objectives.u_safe = u_safe_value;
  out.plan.objectives.u_fuel = u_fuel(head(out.vr), head(out.vmc), cfg.fuel);
  out.plan.objectives.u_eff = u_eff(out.before, out.after, cfg.planner.eta);
  out.plan.feasible = true;
  return out;
}

MergePlan evaluate(const World& snapshot, const DecisionVector& decision) {
  return evaluate_detailed(snapshot, decision).plan;
}

Evaluator make_evaluator(std::shared_ptr<const World> snapshot) {
  return [snapshot](const DecisionVector& d) { return evaluate(*snapshot, d); };
}

}  // namespace hcomc
