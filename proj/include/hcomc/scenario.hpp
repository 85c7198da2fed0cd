#pragma once

#include <cstdint>
#include <string>

#include "hcomc/game_decision.hpp"
#include "hcomc/objectives.hpp"
#include "hcomc/optimizer.hpp"
#include "hcomc/planning.hpp"
#include "hcomc/traffic_models.hpp"
#include "hcomc/vehicle.hpp"

namespace hcomc {

// Straight two-lane highway with a parallel acceleration lane.
struct RoadGeometry {
  double lane_width = 3.75;
  double ramp_y = 0.0;
  double main1_y = 3.75;
  double main2_y = 7.5;
  double control_zone_start_x = 0.0;
  double ramp_merge_start_x = 120.0;
  double ramp_merge_end_x = 300.0;

  void validate() const;
  [[nodiscard]] double lane_y(Lane lane) const;
  [[nodiscard]] double merge_point_x() const {
    return 0.5 * (ramp_merge_start_x + ramp_merge_end_x);
  }
};

struct TrafficParams {
  double mainline_speed = 25.0;
  double ramp_speed = 18.0;
  int vehicles_per_lane = 8;
  // Relative uniform jitter on each spawn headway.
  double headway_jitter = 0.1;
  double vr_desired_speed = 33.3;
  // Acceleration assumed for VR when projecting its arrival at the merge point.
  double vr_nominal_accel = 0.7;

  void validate() const;
};

struct PlannerParams {
  double vr_lane_change_time = 3.0;
  double vmc_lane_change_time = 3.0;
  double track_kp = 0.6;
  double track_kv = 1.2;
  double eta = 0.5;
  // Simulated time kept after merge completion when scoring a candidate.
  double eval_tail = 3.0;
  // A candidate that has not merged this long after its planned end fails.
  double no_merge_slack = 5.0;
  // Hard slot edges: at VR's target neither VR nor its new follower may need
  // to brake harder than this under plain IDM.
  double slot_brake_limit = 2.0;
  double replan_interval = 1.0;
  double post_merge_horizon = 40.0;
  double t_max = 120.0;

  void validate() const;
};

struct BackgroundGameParams {
  bool enabled = true;
  double decision_interval = 1.0;
  double cooldown = 5.0;
  // Minimum own acceleration gain before a lane change is even considered.
  double intention_threshold = 0.3;
  // The new follower must not need to brake harder than this.
  double safe_decel = 2.0;
  double lane_change_time = 3.0;
  GameParams game;
  FvTypeDistribution types;

  void validate() const;
};

struct FifoParams {
  // Gap acceptance: neither VR nor the new follower may need more braking.
  double safe_decel = 2.0;

  void validate() const;
};

struct MetricParams {
  double v_low = 15.0;
  double stab_accel = 0.05;
  double stab_window = 3.0;

  void validate() const;
};

enum class ControllerKind { Hcomc, Fifo };
enum class OptimizerKind { Nsga2, Pso, Sa };

std::string_view to_string(ControllerKind c);
std::string_view to_string(OptimizerKind o);

struct ScenarioConfig {
  std::string condition = "custom";
  RoadGeometry road;
  double headway_main1 = 5.0;
  double headway_main2 = 5.0;
  double cav_penetration = 0.9;
  TrafficParams traffic;
  IdmParams idm;
  HdvParams hdv;  // base is overwritten by idm
  double cav_cooling_factor = 0.99;
  SafetyParams safety;
  FuelModelParams fuel;
  GaConfig ga;
  PsoConfig pso;
  SaConfig sa;
  DecisionSpace decision_space;
  ScalarizationBounds scalarization;
  PlannerParams planner;
  BackgroundGameParams background;
  FifoParams fifo;
  MetricParams metrics;
  ControllerKind controller = ControllerKind::Hcomc;
  OptimizerKind optimizer = OptimizerKind::Nsga2;
  std::uint64_t seed = 1;
  double dt = 0.1;

  void validate() const;
  [[nodiscard]] HdvParams hdv_params(const IdmParams& idm_for_vehicle) const;
  [[nodiscard]] CavParams cav_params(const IdmParams& idm_for_vehicle) const;
  // Plans must stay inside the car-following clamp: [-emergency_decel, a].
  [[nodiscard]] AccelBounds plan_bounds() const {
    return {idm.max_accel_a, idm.emergency_decel};
  }
};

}  // namespace hcomc
