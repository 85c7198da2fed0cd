#include "hcomc/world.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hcomc/collision.hpp"
#include "hcomc/game_decision.hpp"

namespace hcomc {

namespace {

constexpr double kFreeGap = 1e9;
constexpr double kHdvSentinelGap = 1e4;

bool is_main(Lane l) { return l == Lane::Main1 || l == Lane::Main2; }

// Lanes a vehicle currently blocks.
std::array<std::optional<Lane>, 2> occupancy(const SimVehicle& v) {
  if (v.changing()) return {v.lateral->from, v.lateral->to};
  return {v.state.lane, std::nullopt};
}

bool shares_lane(const SimVehicle& a, const SimVehicle& b) {
  for (auto la : occupancy(a)) {
    for (auto lb : occupancy(b)) {
      if (la && lb && *la == *lb) return true;
    }
  }
  return false;
}

bool occupies(const SimVehicle& v, Lane lane) {
  for (auto l : occupancy(v)) {
    if (l && *l == lane) return true;
  }
  return false;
}

double bumper_gap(const SimVehicle& rear, const SimVehicle& front) {
  return front.state.x - rear.state.x - 0.5 * (front.state.length + rear.state.length);
}

CavParams cav_of(const World& w, const SimVehicle& v) { return w.cfg->cav_params(v.idm); }

// IDM without a speed limit: the interaction part only, used as a safety cap
// on planned accelerations.
double interaction_cap(const SimVehicle& v, const LeaderInfo& l) {
  if (!l.exists()) return v.idm.max_accel_a;
  if (l.gap <= 0.0) return -v.idm.emergency_decel;
  IdmParams p = v.idm;
  p.desired_speed_v0 = 1e9;
  return idm_accel(l.gap, v.state.speed, v.state.speed - l.speed, p);
}

double cav_follow(const World& w, const SimVehicle& v, const LeaderInfo& l) {
  if (!l.exists()) return idm_accel(kFreeGap, v.state.speed, 0.0, v.idm);
  if (l.gap <= 0.0) return -v.idm.emergency_decel;
  return cav_accel(l.gap, v.state.speed, v.state.speed - l.speed, l.accel, cav_of(w, v));
}

LeaderInfo nearer(const LeaderInfo& a, const LeaderInfo& b) {
  if (!a.exists()) return b;
  if (!b.exists()) return a;
  return b.gap < a.gap ? b : a;
}

// Leader used for car-following, including projected leaders and the
// ramp-end obstacle.
LeaderInfo effective_leader(const World& w, int i) {
  const SimVehicle& v = w.vehicles[i];
  LeaderInfo l = find_leader(w, i);
  if (v.projected_leader && !v.changing()) {
    l = nearer(l, leader_info(w, i, *v.projected_leader));
  }
  if (v.state.lane == Lane::Ramp && !v.changing()) {
    if (v.ramp_end_obstacle) {
      LeaderInfo wall;
      wall.id = -2;
      wall.gap = w.cfg->road.ramp_merge_end_x - v.state.x - 0.5 * v.state.length;
      l = nearer(l, wall);
    }
  }
  return l;
}

double kind_accel(const World& w, const SimVehicle& v, const LeaderInfo& l) {
  if (v.state.kind == VehicleKind::HDV) {
    const auto p = w.cfg->hdv_params(v.idm);
    // A cut-in can overlap the driver's lagged gap reading.
    if (p.gap_error_factor * v.history.at(w.t - p.tau_gap).gap <= 0.0) return -v.idm.emergency_decel;
    return hdv_accel(v.history, w.t, p);
  }
  return cav_follow(w, v, l);
}

double control_accel(const World& w, int i) {
  const SimVehicle& v = w.vehicles[i];
  const auto& cfg = *w.cfg;
  const LeaderInfo leader = effective_leader(w, i);
  double a = 0.0;

  if (v.track) {
    const auto& m = *v.track;
    const double tc = std::min(w.t, m.t_end);
    const double x_ref = w.t <= m.t_end ? m.position(w.t)
                                        : m.position(m.t_end) + m.speed(m.t_end) * (w.t - m.t_end);
    const double v_ref = m.speed(tc);
    const double ff = w.t <= m.t_end ? m.accel(w.t) : 0.0;
    a = ff + cfg.planner.track_kp * (x_ref - v.state.x) +
        cfg.planner.track_kv * (v_ref - v.state.speed);
    a = std::min(a, interaction_cap(v, leader));
  } else if (v.virtual_leader) {
    const auto& vl = *v.virtual_leader;
    LeaderInfo ghost;
    ghost.id = -3;
    ghost.gap = vl.position(w.t) - v.state.x - v.state.length;
    ghost.speed = vl.speed(w.t);
    ghost.accel = vl.accel(w.t);
    a = std::min(cav_follow(w, v, ghost), interaction_cap(v, leader));
  } else if (v.handover && w.t <= v.handover->blend.t_end) {
    const auto& h = *v.handover;
    const LeaderInfo old_l =
        h.old_leader >= 0 ? leader_info(w, i, h.old_leader) : LeaderInfo{};
    const LeaderInfo new_l =
        h.new_leader >= 0 ? leader_info(w, i, h.new_leader) : LeaderInfo{};
    const double a_ori = (old_l.exists() && old_l.gap > -v.state.length) ? cav_follow(w, v, old_l)
                                                                          : cav_follow(w, v, {});
    const double a_new = (new_l.exists() && new_l.gap > -v.state.length) ? cav_follow(w, v, new_l)
                                                                          : cav_follow(w, v, {});
    a = std::min(blended_accel(a_ori, a_new, w.t, h.blend), interaction_cap(v, leader));
  } else {
    a = kind_accel(w, v, leader);
  }
  return std::clamp(a, -v.idm.emergency_decel, v.idm.max_accel_a);
}

void release_finished_plans(World& w) {
  for (auto& v : w.vehicles) {
    if (v.track && !v.lateral && v.state.lane == Lane::Main1) v.track.reset();
    if (v.handover && w.t > v.handover->blend.t_end) v.handover.reset();
    if (v.virtual_leader) {
      const auto& vl = *v.virtual_leader;
      if (w.t < vl.motion.t_end) continue;
      bool settled = true;
      if (vl.release_vehicle >= 0) {
        const auto& r = w.vehicles[vl.release_vehicle];
        settled = !r.lateral && r.state.lane == vl.release_lane;
      }
      if (settled || w.t >= vl.motion.t_end + vl.release_timeout) v.virtual_leader.reset();
    }
  }
}

void record_perception(World& w) {
  for (std::size_t i = 0; i < w.vehicles.size(); ++i) {
    auto& v = w.vehicles[i];
    if (v.state.kind != VehicleKind::HDV) continue;
    const LeaderInfo l = effective_leader(w, static_cast<int>(i));
    PerceptionSample s{w.t, kHdvSentinelGap, v.state.speed, 0.0};
    if (l.exists() && l.gap < kHdvSentinelGap) {
      s.gap = l.gap;
      s.dspeed = v.state.speed - l.speed;
    }
    v.history.push(s);
  }
}

// Lane-change decisions of background CAVs.
void background_decisions(World& w) {
  const auto& bg = w.cfg->background;
  if (!bg.enabled) return;
  const auto every = std::max<std::int64_t>(1, std::llround(bg.decision_interval / w.dt()));
  if (w.step_count % every != 0) return;

  const auto& road = w.cfg->road;
  for (std::size_t k = 0; k < w.vehicles.size(); ++k) {
    const int i = static_cast<int>(k);
    const SimVehicle& v = w.vehicles[k];
    if (v.state.role != Role::Background || v.state.kind != VehicleKind::CAV) continue;
    if (!is_main(v.state.lane) || v.lateral) continue;
    if (w.t - v.last_lane_change_t < bg.cooldown) continue;

    const Lane other = v.state.lane == Lane::Main1 ? Lane::Main2 : Lane::Main1;
    const int lead_now = find_leader_in_lane(w, i, v.state.lane);
    const int lead_other = find_leader_in_lane(w, i, other);
    const int fol_other = find_follower_in_lane(w, i, other);
    const double a_now = nominal_accel(v, leader_info(w, i, lead_now));
    const double a_other = nominal_accel(v, leader_info(w, i, lead_other));
    if (a_other - a_now <= bg.intention_threshold) continue;
    if (lead_other >= 0 && bumper_gap(v, w.vehicles[lead_other]) <= 0.0) continue;
    if (fol_other >= 0) {
      const auto& f = w.vehicles[fol_other];
      if (bumper_gap(f, v) <= 0.0) continue;
      if (nominal_accel(f, leader_info(w, fol_other, i)) < -bg.safe_decel) continue;
    }

    auto scene_vehicle = [&](int id) -> std::optional<SceneVehicle> {
      if (id < 0) return std::nullopt;
      const auto& s = w.vehicles[id];
      return SceneVehicle{s.state.x, s.state.speed, s.state.length, s.state.width, s.idm};
    };
    LocalScene scene;
    scene.sv = *scene_vehicle(i);
    scene.sv_leader = scene_vehicle(lead_now);
    scene.sv_follower = scene_vehicle(find_follower_in_lane(w, i, v.state.lane));
    scene.fv = scene_vehicle(fol_other);
    scene.target_leader = scene_vehicle(lead_other);
    scene.fv_follower =
        fol_other >= 0 ? scene_vehicle(find_follower_in_lane(w, fol_other, other)) : std::nullopt;
    scene.current_lane_y = road.lane_y(v.state.lane);
    scene.target_lane_y = road.lane_y(other);

    const auto decision = sv_decide(scene, bg.types, bg.game);
    w.vehicles[k].last_lane_change_t = w.t;
    if (decision.sv_action == SvAction::ChangeLane) {
      start_lane_change(w, i, other, bg.lane_change_time);
    }
  }
}

void integrate(World& w, const std::vector<double>& accel) {
  const double dt = w.dt();
  const auto& road = w.cfg->road;
  for (std::size_t i = 0; i < w.vehicles.size(); ++i) {
    auto& v = w.vehicles[i];
    auto& s = v.state;
    const double v_next = std::max(0.0, s.speed + accel[i] * dt);
    s.accel = (v_next - s.speed) / dt;
    s.speed = v_next;
    s.x += s.speed * dt;
    if (v.lateral) {
      const auto& m = *v.lateral;
      if (s.x >= m.poly.x_end) {
        s.y = road.lane_y(m.to);
        s.lane = m.to;
        s.heading = 0.0;
        v.lateral.reset();
      } else {
        s.y = m.base_y + m.poly.y_clamped(s.x);
        const bool inside = s.x >= m.poly.x_start;
        s.heading = inside ? std::atan(m.poly.dy(s.x)) : 0.0;
        const double y_from = road.lane_y(m.from);
        const double y_to = road.lane_y(m.to);
        s.lane = std::abs(s.y - y_to) < std::abs(s.y - y_from) ? m.to : m.from;
      }
    }
  }
}

void detect_collision(World& w) {
  const auto n = w.vehicles.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = w.vehicles[i].state;
      const auto& b = w.vehicles[j].state;
      if (std::abs(a.x - b.x) > 0.5 * (a.length + b.length) + 1.0) continue;
      if (std::abs(a.y - b.y) > 0.5 * (a.length + b.length)) continue;
      if (footprints_collide(footprint_of(a), footprint_of(b))) {
        w.collision = CollisionEvent{w.t, a.id, b.id};
        return;
      }
    }
  }
}

}  // namespace

double VirtualLeader::position(double t) const {
  if (t <= motion.t_end) return motion.position(t);
  return motion.position(motion.t_end) + motion.speed(motion.t_end) * (t - motion.t_end);
}

double VirtualLeader::speed(double t) const {
  return motion.speed(std::min(t, motion.t_end));
}

double VirtualLeader::accel(double t) const { return t <= motion.t_end ? motion.accel(t) : 0.0; }

double equilibrium_desired_speed(double gap, double speed, const IdmParams& p) {
  const double s_star = p.min_gap_s0 + speed * p.safe_headway_Ts;
  const double r = s_star / gap;
  if (!(r < 1.0)) {
    std::ostringstream msg;
    msg << "spawn gap " << gap << " m is below the desired gap " << s_star << " m";
    throw ConfigError(msg.str());
  }
  return speed / std::pow(1.0 - r * r, 1.0 / p.accel_exponent_delta);
}

double projected_arrival_time(double distance, double speed, double top_speed, double accel) {
  if (distance <= 0.0) return 0.0;
  if (speed >= top_speed) return distance / std::max(speed, 1e-6);
  const double t_acc = (top_speed - speed) / accel;
  const double d_acc = 0.5 * (speed + top_speed) * t_acc;
  if (d_acc >= distance) {
    return (-speed + std::sqrt(speed * speed + 2.0 * accel * distance)) / accel;
  }
  return t_acc + (distance - d_acc) / top_speed;
}

World build_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  World w;
  auto shared = std::make_shared<ScenarioConfig>(cfg);
  shared->seed = seed;
  w.cfg = shared;

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x5ce7u};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const auto& road = cfg.road;
  const auto& tr = cfg.traffic;

  SimVehicle vr;
  vr.state.id = 0;
  vr.state.kind = VehicleKind::CAV;
  vr.state.lane = Lane::Ramp;
  vr.state.x = road.control_zone_start_x;
  vr.state.y = road.ramp_y;
  vr.state.speed = tr.ramp_speed;
  vr.idm = cfg.idm;
  vr.idm.desired_speed_v0 = tr.vr_desired_speed;
  w.vehicles.push_back(vr);

  const double t_arrive = projected_arrival_time(road.merge_point_x() - vr.state.x, tr.ramp_speed,
                                                 tr.mainline_speed, tr.vr_nominal_accel);
  const double anchor = road.merge_point_x() - tr.mainline_speed * t_arrive;
  const int n = tr.vehicles_per_lane;

  for (Lane lane : {Lane::Main1, Lane::Main2}) {
    const double headway = lane == Lane::Main1 ? cfg.headway_main1 : cfg.headway_main2;
    const double spacing = headway * tr.mainline_speed;
    const double phase = (unit(rng) - 0.5) * spacing;
    double x = anchor + 0.5 * (n - 1) * spacing + phase;
    for (int k = 0; k < n; ++k) {
      SimVehicle v;
      v.state.id = static_cast<int>(w.vehicles.size());
      v.state.lane = lane;
      v.state.y = road.lane_y(lane);
      v.state.speed = tr.mainline_speed;
      v.idm = cfg.idm;
      if (k > 0) {
        const double jitter = 1.0 + tr.headway_jitter * (2.0 * unit(rng) - 1.0);
        x -= spacing * jitter;
        const double gap = w.vehicles.back().state.x - x - 0.5 * (v.state.length + 5.0);
        try {
          v.idm.desired_speed_v0 = equilibrium_desired_speed(gap, tr.mainline_speed, cfg.idm);
        } catch (const ConfigError& e) {
          throw ConfigError(std::string(lane == Lane::Main1 ? "headway_main1" : "headway_main2") +
                            ": " + e.what());
        }
      } else {
        v.idm.desired_speed_v0 = tr.mainline_speed;
      }
      v.state.x = x;
      v.state.kind = unit(rng) < cfg.cav_penetration ? VehicleKind::CAV : VehicleKind::HDV;
      w.vehicles.push_back(v);
    }
  }
  assign_roles(w);
  return w;
}

void assign_roles(World& w) {
  KeyRoles r;
  r.vr = 0;
  for (auto& v : w.vehicles) v.state.role = Role::Background;
  w.vehicles[0].state.role = Role::VR;

  const auto& road = w.cfg->road;
  const auto& vr = w.vehicles[0].state;
  const double xm = road.merge_point_x();
  const auto& tr = w.cfg->traffic;
  const double t_arrive =
      projected_arrival_time(xm - vr.x, vr.speed, tr.mainline_speed, tr.vr_nominal_accel);

  double best = 1e18;
  for (const auto& v : w.vehicles) {
    if (v.state.lane != Lane::Main1 || v.state.role == Role::VR) continue;
    const double d = std::abs(v.state.x + v.state.speed * t_arrive - xm);
    if (d < best) {
      best = d;
      r.vmc = v.state.id;
    }
  }
  if (r.vmc >= 0) {
    r.vmf = find_leader_in_lane(w, r.vmc, Lane::Main1);
    r.vmr = find_follower_in_lane(w, r.vmc, Lane::Main1);
    r.vnf = find_leader_in_lane(w, r.vmc, Lane::Main2);
    r.vnr = find_follower_in_lane(w, r.vmc, Lane::Main2);
  }
  const std::array<Role, 6> roles{Role::VR, Role::VMC, Role::VMF, Role::VMR, Role::VNF, Role::VNR};
  const auto ids = r.ids();
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] >= 0) w.vehicles[ids[k]].state.role = roles[k];
  }
  w.roles = r;
}

LeaderInfo find_leader(const World& w, int i) {
  const SimVehicle& me = w.vehicles[i];
  LeaderInfo best;
  double best_x = 1e18;
  for (std::size_t k = 0; k < w.vehicles.size(); ++k) {
    const auto& o = w.vehicles[k];
    if (static_cast<int>(k) == i || o.state.x <= me.state.x) continue;
    if (!shares_lane(me, o)) continue;
    if (o.state.x < best_x) {
      best_x = o.state.x;
      best = {o.state.id, bumper_gap(me, o), o.state.speed, o.state.accel};
    }
  }
  return best;
}

int find_leader_in_lane(const World& w, int i, Lane lane) {
  const auto& me = w.vehicles[i];
  int best = -1;
  for (std::size_t k = 0; k < w.vehicles.size(); ++k) {
    const auto& o = w.vehicles[k];
    if (static_cast<int>(k) == i || o.state.x <= me.state.x || !occupies(o, lane)) continue;
    if (best < 0 || o.state.x < w.vehicles[best].state.x) best = static_cast<int>(k);
  }
  return best;
}

int find_follower_in_lane(const World& w, int i, Lane lane) {
  const auto& me = w.vehicles[i];
  int best = -1;
  for (std::size_t k = 0; k < w.vehicles.size(); ++k) {
    const auto& o = w.vehicles[k];
    if (static_cast<int>(k) == i || o.state.x >= me.state.x || !occupies(o, lane)) continue;
    if (best < 0 || o.state.x > w.vehicles[best].state.x) best = static_cast<int>(k);
  }
  return best;
}

LeaderInfo leader_info(const World& w, int i, int leader_id) {
  if (leader_id < 0) return {};
  const auto& me = w.vehicles[i];
  const auto& l = w.vehicles[leader_id];
  return {leader_id, bumper_gap(me, l), l.state.speed, l.state.accel};
}

double nominal_accel(const SimVehicle& v, const LeaderInfo& l) {
  if (!l.exists()) return idm_accel(kFreeGap, v.state.speed, 0.0, v.idm);
  if (l.gap <= 0.0) return -v.idm.emergency_decel;
  return idm_accel(l.gap, v.state.speed, v.state.speed - l.speed, v.idm);
}

void start_lane_change(World& w, int i, Lane to, double duration) {
  auto& v = w.vehicles[i];
  const auto& road = w.cfg->road;
  const double span = std::max(v.state.speed * duration, 10.0);
  LateralManeuver m;
  m.from = v.state.lane;
  m.to = to;
  m.base_y = v.state.y;
  m.poly = fit_quintic(v.state.x, v.state.x + span, road.lane_y(to) - v.state.y);
  v.lateral = m;
  v.last_lane_change_t = w.t;
}

void step(World& w) {
  if (w.collision) return;
  background_decisions(w);
  record_perception(w);

  std::vector<double> accel(w.vehicles.size());
  for (std::size_t i = 0; i < w.vehicles.size(); ++i) {
    accel[i] = control_accel(w, static_cast<int>(i));
  }
  integrate(w, accel);
  ++w.step_count;
  w.t = static_cast<double>(w.step_count) * w.dt();

  detect_collision(w);
  const auto& vr = w.vehicles[w.roles.vr].state;
  if (!w.merge_time && std::abs(vr.y - w.cfg->road.main1_y) <= 0.05) w.merge_time = w.t;
  release_finished_plans(w);
}

}  // namespace hcomc
