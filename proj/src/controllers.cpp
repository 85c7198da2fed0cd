#include "hcomc/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hcomc {

namespace {

void record_rows(const World& w, RunResult& out) {
  for (const auto& v : w.vehicles) {
    const auto& s = v.state;
    out.rows.push_back({w.t, s.id, s.role, s.kind, s.lane, s.x, s.y, s.speed, s.accel});
  }
}

RunResult start_result(const World& w, const ScenarioConfig& cfg, std::uint64_t seed,
                       ControllerKind controller) {
  RunResult out;
  out.condition = cfg.condition;
  out.controller = controller;
  out.optimizer = cfg.optimizer;
  out.seed = seed;
  out.dt = cfg.dt;
  out.vehicle_count = w.vehicles.size();
  for (const auto& v : w.vehicles) out.lengths.push_back(v.state.length);
  out.roles = w.roles;
  record_rows(w, out);
  return out;
}

bool run_finished(const World& w) {
  const auto& pl = w.cfg->planner;
  if (w.collision) return true;
  if (w.t >= pl.t_max - 1e-9) return true;
  return w.merge_time && w.t >= *w.merge_time + pl.post_merge_horizon - 1e-9;
}

void note_forced_stop(const World& w, RunResult& out) {
  if (out.forced_stop_time) return;
  const auto& vr = w.vr();
  if (vr.state.lane != Lane::Ramp || vr.lateral) return;
  const double limit = w.cfg->road.ramp_merge_end_x - 0.5 * vr.state.length -
                       vr.idm.min_gap_s0 - 1.0;
  if (vr.state.speed < 0.5 && vr.state.x >= limit) out.forced_stop_time = w.t;
}

}  // namespace

PlanOutcome plan_merge(const World& snapshot, OptimizerKind optimizer, std::uint64_t seed) {
  const auto& cfg = *snapshot.cfg;
  auto evaluator = make_evaluator(std::make_shared<const World>(snapshot));
  GaConfig ga = cfg.ga;
  ga.seed = seed;

  PlanOutcome out;
  switch (optimizer) {
    case OptimizerKind::Nsga2: {
      auto res = nsga2_run(evaluator, cfg.decision_space, ga);
      out.pareto = res.pareto;
      out.chosen = select_unique(out.pareto);
      break;
    }
    case OptimizerKind::Pso: {
      auto res = pso_run(evaluator, cfg.decision_space, cfg.pso, ga, cfg.scalarization);
      out.chosen = res.best;
      out.pareto = {res.best};
      break;
    }
    case OptimizerKind::Sa: {
      auto res = sa_run(evaluator, cfg.decision_space, cfg.sa, ga, cfg.scalarization);
      out.chosen = res.best;
      out.pareto = {res.best};
      break;
    }
  }
  out.cost = scalarized_cost(out.chosen, cfg.scalarization);
  return out;
}

RunResult run_hcomc(const ScenarioConfig& cfg, std::uint64_t seed) {
  World w = build_scenario(cfg, seed);
  RunResult out = start_result(w, cfg, seed, ControllerKind::Hcomc);
  const auto& pl = w.cfg->planner;

  bool planned = false;
  double next_plan = w.t;
  while (!run_finished(w)) {
    const auto& vr = w.vr();
    if (!planned && !w.merge_time && vr.state.lane == Lane::Ramp && !vr.lateral &&
        w.t >= next_plan - 1e-9) {
      if (out.planning_attempts > 0) assign_roles(w);
      const auto outcome =
          plan_merge(w, cfg.optimizer, seed + static_cast<std::uint64_t>(out.planning_attempts));
      ++out.planning_attempts;
      if (outcome.chosen.feasible) {
        install_merge_plan(w, outcome.chosen.decision);
        planned = true;
        out.roles = w.roles;
        out.executed_plan = outcome.chosen;
        out.pareto = outcome.pareto;
        out.plan_cost = outcome.cost;
      } else {
        // Yield: hold on the acceleration lane and try again later.
        w.vr().ramp_end_obstacle = true;
        next_plan = w.t + pl.replan_interval;
        if (!out.executed_plan) {
          out.pareto = outcome.pareto;
          out.plan_cost = outcome.cost;
        }
      }
    }
    step(w);
    record_rows(w, out);
    note_forced_stop(w, out);
  }
  out.merge_time = w.merge_time;
  out.collision = w.collision;
  out.end_time = w.t;
  return out;
}

FifoSlot fifo_slot(const World& w) {
  const double xm = w.cfg->road.merge_point_x();
  const auto& vs = w.vr().state;
  const double t_vr = (xm - vs.x) / std::max(vs.speed, 1e-6);
  FifoSlot slot;
  double leader_t = -std::numeric_limits<double>::infinity();
  double successor_t = std::numeric_limits<double>::infinity();
  for (const auto& v : w.vehicles) {
    if (v.state.lane != Lane::Main1) continue;
    const double t_arr = (xm - v.state.x) / std::max(v.state.speed, 1e-6);
    if (t_arr <= t_vr && t_arr > leader_t) {
      leader_t = t_arr;
      slot.leader = v.state.id;
    }
    if (t_arr > t_vr && t_arr < successor_t) {
      successor_t = t_arr;
      slot.successor = v.state.id;
    }
  }
  return slot;
}

RunResult run_fifo(const ScenarioConfig& cfg, std::uint64_t seed) {
  World w = build_scenario(cfg, seed);
  RunResult out = start_result(w, cfg, seed, ControllerKind::Fifo);
  const auto& road = w.cfg->road;
  const auto& pl = w.cfg->planner;

  const auto [leader, successor] = fifo_slot(w);
  // Both sides of VR's slot keep the order: VR trails its predecessor and
  // the successor trails VR, each through the projected gap.
  if (leader >= 0) w.vr().projected_leader = leader;
  if (successor >= 0) w.vehicles[successor].projected_leader = w.roles.vr;
  w.vr().ramp_end_obstacle = true;

  const double b_safe = w.cfg->fifo.safe_decel;
  while (!run_finished(w)) {
    auto& vr = w.vr();
    if (!w.merge_time && vr.state.lane == Lane::Ramp && !vr.lateral &&
        vr.state.x >= road.ramp_merge_start_x) {
      const int id = w.roles.vr;
      const double span = std::max(vr.state.speed * pl.vr_lane_change_time, 10.0);
      bool accept = vr.state.x + span <= road.ramp_merge_end_x;
      const int l1 = find_leader_in_lane(w, id, Lane::Main1);
      const int f1 = find_follower_in_lane(w, id, Lane::Main1);
      if (accept && l1 >= 0) {
        const auto li = leader_info(w, id, l1);
        accept = li.gap > 0.0 && nominal_accel(vr, li) >= -b_safe;
      }
      if (accept && f1 >= 0) {
        const auto fi = leader_info(w, f1, id);
        accept = fi.gap > 0.0 && nominal_accel(w.vehicles[f1], fi) >= -b_safe;
      }
      if (accept) {
        start_lane_change(w, id, Lane::Main1, pl.vr_lane_change_time);
        w.vr().projected_leader.reset();
        if (successor >= 0) w.vehicles[successor].projected_leader.reset();
      }
    }
    step(w);
    record_rows(w, out);
    note_forced_stop(w, out);
  }
  out.merge_time = w.merge_time;
  out.collision = w.collision;
  out.end_time = w.t;
  return out;
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  return cfg.controller == ControllerKind::Hcomc ? run_hcomc(cfg, cfg.seed)
                                                 : run_fifo(cfg, cfg.seed);
}

}  // namespace hcomc
