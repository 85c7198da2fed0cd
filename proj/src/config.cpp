#include "hcomc/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#ifndef HCOMC_PRESET_DIR
#define HCOMC_PRESET_DIR "configs"
#endif

namespace hcomc {

using json = nlohmann::json;

std::string_view to_string(ControllerKind c) { return c == ControllerKind::Hcomc ? "hcomc" : "fifo"; }

std::string_view to_string(OptimizerKind o) {
  switch (o) {
    case OptimizerKind::Nsga2: return "nsga2";
    case OptimizerKind::Pso: return "pso";
    case OptimizerKind::Sa: return "sa";
  }
  return "?";
}

ControllerKind parse_controller(const std::string& s) {
  if (s == "hcomc") return ControllerKind::Hcomc;
  if (s == "fifo") return ControllerKind::Fifo;
  throw ConfigError("controller: expected hcomc or fifo, got '" + s + "'");
}

OptimizerKind parse_optimizer(const std::string& s) {
  if (s == "nsga2") return OptimizerKind::Nsga2;
  if (s == "pso") return OptimizerKind::Pso;
  if (s == "sa") return OptimizerKind::Sa;
  throw ConfigError("optimizer: expected nsga2, pso or sa, got '" + s + "'");
}

void RoadGeometry::validate() const {
  if (!(lane_width > 0)) throw ConfigError("road.lane_width must be positive");
  if (!(ramp_merge_end_x > ramp_merge_start_x)) {
    throw ConfigError("road.ramp_merge_end_x must exceed road.ramp_merge_start_x");
  }
  if (ramp_merge_start_x < control_zone_start_x) {
    throw ConfigError("road.ramp_merge_start_x must not precede road.control_zone_start_x");
  }
  if (!(main2_y > main1_y && main1_y > ramp_y)) {
    throw ConfigError("road: lane centerlines must satisfy ramp_y < main1_y < main2_y");
  }
}

double RoadGeometry::lane_y(Lane lane) const {
  switch (lane) {
    case Lane::Ramp: return ramp_y;
    case Lane::Main1: return main1_y;
    case Lane::Main2: return main2_y;
  }
  return main1_y;
}

void TrafficParams::validate() const {
  if (!(mainline_speed > 0)) throw ConfigError("traffic.mainline_speed must be positive");
  if (!(ramp_speed > 0)) throw ConfigError("traffic.ramp_speed must be positive");
  if (vehicles_per_lane < 0) throw ConfigError("traffic.vehicles_per_lane must be >= 0");
  if (headway_jitter < 0 || headway_jitter >= 1) {
    throw ConfigError("traffic.headway_jitter must lie in [0,1)");
  }
  if (!(vr_desired_speed > 0)) throw ConfigError("traffic.vr_desired_speed must be positive");
  if (!(vr_nominal_accel > 0)) throw ConfigError("traffic.vr_nominal_accel must be positive");
}

void PlannerParams::validate() const {
  if (!(vr_lane_change_time > 0)) throw ConfigError("planner.vr_lane_change_time must be positive");
  if (!(vmc_lane_change_time > 0)) throw ConfigError("planner.vmc_lane_change_time must be positive");
  if (track_kp < 0 || track_kv < 0) throw ConfigError("planner: tracking gains must be >= 0");
  if (eta < 0) throw ConfigError("planner.eta must be >= 0");
  if (eval_tail < 0 || no_merge_slack < 0) throw ConfigError("planner: tail and slack must be >= 0");
  if (!(slot_brake_limit > 0)) throw ConfigError("planner.slot_brake_limit must be positive");
  if (!(replan_interval > 0)) throw ConfigError("planner.replan_interval must be positive");
  if (post_merge_horizon < 0) throw ConfigError("planner.post_merge_horizon must be >= 0");
  if (!(t_max > 0)) throw ConfigError("planner.t_max must be positive");
}

void BackgroundGameParams::validate() const {
  if (!(decision_interval > 0)) throw ConfigError("background.decision_interval must be positive");
  if (cooldown < 0) throw ConfigError("background.cooldown must be >= 0");
  if (!(safe_decel > 0)) throw ConfigError("background.safe_decel must be positive");
  if (!(lane_change_time > 0)) throw ConfigError("background.lane_change_time must be positive");
  if (!(game.horizon > 0 && game.dt > 0)) throw ConfigError("background: horizon and dt > 0");
  try {
    types.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("background.type_probabilities: ") + e.what());
  }
}

void FifoParams::validate() const {
  if (!(safe_decel > 0)) throw ConfigError("fifo.safe_decel must be positive");
}

void MetricParams::validate() const {
  if (v_low < 0) throw ConfigError("metrics.v_low must be >= 0");
  if (!(stab_accel > 0)) throw ConfigError("metrics.stab_accel must be positive");
  if (stab_window < 0) throw ConfigError("metrics.stab_window must be >= 0");
}

void ScenarioConfig::validate() const {
  road.validate();
  if (!(headway_main1 > 0)) throw ConfigError("headway_main1 must be positive");
  if (!(headway_main2 > 0)) throw ConfigError("headway_main2 must be positive");
  if (cav_penetration < 0 || cav_penetration > 1) {
    throw ConfigError("cav_penetration must lie in [0,1]");
  }
  if (!(dt > 0)) throw ConfigError("dt must be positive");
  traffic.validate();
  planner.validate();
  background.validate();
  fifo.validate();
  metrics.validate();
  auto wrap = [](const char* section, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string(section) + ": " + e.what());
    }
  };
  wrap("idm", [&] { idm.validate(); });
  wrap("hdv", [&] { hdv_params(idm).validate(); });
  wrap("cav", [&] { cav_params(idm).validate(); });
  wrap("safety", [&] { safety.validate(); });
  wrap("ga", [&] { ga.validate(); });
  wrap("pso", [&] { pso.validate(); });
  wrap("sa", [&] { sa.validate(); });
  wrap("decision", [&] { decision_space.validate(); });
}

HdvParams ScenarioConfig::hdv_params(const IdmParams& idm_for_vehicle) const {
  HdvParams p = hdv;
  p.base = idm_for_vehicle;
  return p;
}

CavParams ScenarioConfig::cav_params(const IdmParams& idm_for_vehicle) const {
  return {idm_for_vehicle, cav_cooling_factor};
}

namespace {

using Setter = std::function<void(const json&, const std::string&)>;
struct Field {
  const char* name;
  Setter set;
};

void read_object(const json& j, const std::string& path, std::initializer_list<Field> fields) {
  if (!j.is_object()) throw ConfigError((path.empty() ? "<root>" : path) + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    const std::string full = path.empty() ? key : path + "." + key;
    const auto it = std::find_if(fields.begin(), fields.end(),
                                 [&](const Field& f) { return key == f.name; });
    if (it == fields.end()) throw ConfigError(full + ": unknown key");
    it->set(value, full);
  }
}

Setter num(double& out) {
  return [&out](const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError(key + ": expected a number");
    out = v.get<double>();
  };
}

Setter integer(int& out) {
  return [&out](const json& v, const std::string& key) {
    if (!v.is_number_integer()) throw ConfigError(key + ": expected an integer");
    out = v.get<int>();
  };
}

Setter boolean(bool& out) {
  return [&out](const json& v, const std::string& key) {
    if (!v.is_boolean()) throw ConfigError(key + ": expected true or false");
    out = v.get<bool>();
  };
}

template <std::size_t N>
Setter numbers(std::array<double, N>& out) {
  return [&out](const json& v, const std::string& key) {
    if (!v.is_array() || v.size() != N) {
      throw ConfigError(key + ": expected an array of " + std::to_string(N) + " numbers");
    }
    for (std::size_t k = 0; k < N; ++k) {
      if (!v[k].is_number()) throw ConfigError(key + ": expected numbers");
      out[k] = v[k].get<double>();
    }
  };
}

Setter section(std::function<void(const json&, const std::string&)> fn) { return fn; }

void apply_json(ScenarioConfig& c, const json& root) {
  auto& r = c.road;
  auto& tr = c.traffic;
  auto& idm = c.idm;
  auto& hdv = c.hdv;
  auto& pl = c.planner;
  auto& bg = c.background;
  read_object(root, "", {
    {"condition", [&](const json& v, const std::string& k) {
       if (!v.is_string()) throw ConfigError(k + ": expected a string");
       c.condition = v.get<std::string>();
     }},
    {"headway_main1", num(c.headway_main1)},
    {"headway_main2", num(c.headway_main2)},
    {"cav_penetration", num(c.cav_penetration)},
    {"dt", num(c.dt)},
    {"seed", [&](const json& v, const std::string& k) {
       if (!v.is_number_unsigned()) throw ConfigError(k + ": expected a non-negative integer");
       c.seed = v.get<std::uint64_t>();
     }},
    {"controller", [&](const json& v, const std::string& k) {
       if (!v.is_string()) throw ConfigError(k + ": expected a string");
       c.controller = parse_controller(v.get<std::string>());
     }},
    {"optimizer", [&](const json& v, const std::string& k) {
       if (!v.is_string()) throw ConfigError(k + ": expected a string");
       c.optimizer = parse_optimizer(v.get<std::string>());
     }},
    {"road", section([&](const json& v, const std::string& k) {
       read_object(v, k, {{"lane_width", num(r.lane_width)},
                          {"ramp_y", num(r.ramp_y)},
                          {"main1_y", num(r.main1_y)},
                          {"main2_y", num(r.main2_y)},
                          {"control_zone_start_x", num(r.control_zone_start_x)},
                          {"ramp_merge_start_x", num(r.ramp_merge_start_x)},
                          {"ramp_merge_end_x", num(r.ramp_merge_end_x)}});
     })},
    {"traffic", section([&](const json& v, const std::string& k) {
       read_object(v, k, {{"mainline_speed", num(tr.mainline_speed)},
                          {"ramp_speed", num(tr.ramp_speed)},
                          {"vehicles_per_lane", integer(tr.vehicles_per_lane)},
                          {"headway_jitter", num(tr.headway_jitter)},
                          {"vr_desired_speed", num(tr.vr_desired_speed)},
                          {"vr_nominal_accel", num(tr.vr_nominal_accel)}});
     })},
    {"idm", section([&](const json& v, const std::string& k) {
       read_object(v, k, {{"max_accel_a", num(idm.max_accel_a)},
                          {"desired_speed_v0", num(idm.desired_speed_v0)},
                          {"accel_exponent_delta", num(idm.accel_exponent_delta)},
                          {"min_gap_s0", num(idm.min_gap_s0)},
                          {"safe_headway_Ts", num(idm.safe_headway_Ts)},
                          {"comfort_decel_b", num(idm.comfort_decel_b)},
                          {"emergency_decel", num(idm.emergency_decel)}});
     })},
    {"hdv", section([&](const json& v, const std::string& k) {
       read_object(v, k, {{"tau_gap", num(hdv.tau_gap)},
                          {"tau_speed", num(hdv.tau_speed)},
                          {"tau_dspeed", num(hdv.tau_dspeed)},
                          {"gap_error_factor", num(hdv.gap_error_factor)},
                          {"dspeed_error_factor", num(hdv.dspeed_error_factor)}});
     })},
    {"cav", section([&](const json& v, const std::string& k) {
       read_object(v, k, {{"cooling_factor_c", num(c.cav_cooling_factor)}});
     })},
    {"safety", section([&](const json& v, const std::string& k) {
       read_object(v, k, {{"delay_T", num(c.safety.delay_T)},
                          {"emergency_decel_a_merg", num(c.safety.emergency_decel_a_merg)},
                          {"min_distance_D", num(c.safety.min_distance_D)}});
     })},
    {"fuel", section([&](const json& v, const std::string& k) {
       read_object(v, k, {{"Q", numbers(c.fuel.Q)}, {"R", numbers(c.fuel.R)}});
     })},
    {"ga", section([&](const json& v, const std::string& k) {
       read_object(v, k, {{"population", integer(c.ga.population)},
                          {"generations", integer(c.ga.generations)},
                          {"crossover_prob", num(c.ga.crossover_prob)},
                          {"mutation_prob", num(c.ga.mutation_prob)},
                          {"eta_crossover", num(c.ga.eta_crossover)},
                          {"eta_mutation", num(c.ga.eta_mutation)}});
     })},
    {"pso", section([&](const json& v, const std::string& k) {
       read_object(v, k, {{"particles", integer(c.pso.particles)},
                          {"inertia", num(c.pso.inertia)},
                          {"cognitive", num(c.pso.cognitive)},
                          {"social", num(c.pso.social)}});
     })},
    {"sa", section([&](const json& v, const std::string& k) {
       read_object(v, k, {{"initial_temperature", num(c.sa.initial_temperature)},
                          {"cooling", num(c.sa.cooling)},
                          {"step_fraction", num(c.sa.step_fraction)},
                          {"discrete_move_prob", num(c.sa.discrete_move_prob)},
                          {"initial_samples", integer(c.sa.initial_samples)}});
     })},
    {"decision", section([&](const json& v, const std::string& k) {
       read_object(v, k, {{"t_min", num(c.decision_space.t_min)},
                          {"t_max", num(c.decision_space.t_max)},
                          {"t_step", num(c.decision_space.t_step)}});
     })},
    {"scalarization", section([&](const json& v, const std::string& k) {
       read_object(v, k, {{"fuel_lo", num(c.scalarization.fuel_lo)},
                          {"fuel_hi", num(c.scalarization.fuel_hi)},
                          {"neg_eff_lo", num(c.scalarization.neg_eff_lo)},
                          {"neg_eff_hi", num(c.scalarization.neg_eff_hi)}});
     })},
    {"planner", section([&](const json& v, const std::string& k) {
       read_object(v, k, {{"vr_lane_change_time", num(pl.vr_lane_change_time)},
                          {"vmc_lane_change_time", num(pl.vmc_lane_change_time)},
                          {"track_kp", num(pl.track_kp)},
                          {"track_kv", num(pl.track_kv)},
                          {"eta", num(pl.eta)},
                          {"eval_tail", num(pl.eval_tail)},
                          {"no_merge_slack", num(pl.no_merge_slack)},
                          {"slot_brake_limit", num(pl.slot_brake_limit)},
                          {"replan_interval", num(pl.replan_interval)},
                          {"post_merge_horizon", num(pl.post_merge_horizon)},
                          {"t_max", num(pl.t_max)}});
     })},
    {"background", section([&](const json& v, const std::string& k) {
       read_object(v, k, {{"enabled", boolean(bg.enabled)},
                          {"decision_interval", num(bg.decision_interval)},
                          {"cooldown", num(bg.cooldown)},
                          {"intention_threshold", num(bg.intention_threshold)},
                          {"safe_decel", num(bg.safe_decel)},
                          {"lane_change_time", num(bg.lane_change_time)},
                          {"w_safe", num(bg.game.w_safe)},
                          {"w_eff", num(bg.game.w_eff)},
                          {"w_comf", num(bg.game.w_comf)},
                          {"collision_penalty", num(bg.game.collision_penalty)},
                          {"horizon", num(bg.game.horizon)},
                          {"politeness_eta", num(bg.game.politeness_eta)},
                          {"fv_accel_fraction", num(bg.game.fv_accel_fraction)},
                          {"fv_decel_fraction", num(bg.game.fv_decel_fraction)},
                          {"type_probabilities", numbers(bg.types.p)}});
     })},
    {"fifo", section([&](const json& v, const std::string& k) {
       read_object(v, k, {{"safe_decel", num(c.fifo.safe_decel)}});
     })},
    {"metrics", section([&](const json& v, const std::string& k) {
       read_object(v, k, {{"v_low", num(c.metrics.v_low)},
                          {"stab_accel", num(c.metrics.stab_accel)},
                          {"stab_window", num(c.metrics.stab_window)}});
     })},
  });
  c.ga.seed = c.seed;
  c.background.game.safety = c.safety;
  c.background.game.dt = c.dt;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
  ScenarioConfig cfg;
  const bool blank = std::all_of(text.begin(), text.end(),
                                 [](unsigned char ch) { return std::isspace(ch) != 0; });
  if (!blank) {
    json root;
    try {
      root = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(origin + ": parse error: " + e.what());
    }
    apply_json(cfg, root);
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::vector<std::string> preset_names() {
  return {"condition1", "condition2", "condition3", "condition4", "condition5"};
}

std::filesystem::path preset_path(const std::string& name) {
  std::string stem = name;
  if (stem.size() == 1 && std::isdigit(static_cast<unsigned char>(stem[0]))) stem = "condition" + stem;
  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), stem) == names.end()) {
    throw ConfigError("condition: unknown preset '" + name + "'");
  }
  return std::filesystem::path(HCOMC_PRESET_DIR) / (stem + ".json");
}

ScenarioConfig load_preset(const std::string& name) { return load_config(preset_path(name)); }

}  // namespace hcomc
