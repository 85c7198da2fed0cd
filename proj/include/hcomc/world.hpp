#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hcomc/planning.hpp"
#include "hcomc/scenario.hpp"
#include "hcomc/traffic_models.hpp"

namespace hcomc {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LateralManeuver {
  LaneChangePoly poly;
  double base_y = 0.0;
  Lane from = Lane::Main1;
  Lane to = Lane::Main1;
};

// Synthetic leader moving on a cubic; extrapolated at constant speed after
// its end time until released.
struct VirtualLeader {
  CubicMotion motion;
  // Released once this vehicle has settled in `release_lane` after the end
  // time (or `release_timeout` seconds past it).
  int release_vehicle = -1;
  Lane release_lane = Lane::Main1;
  double release_timeout = 10.0;

  [[nodiscard]] double position(double t) const;
  [[nodiscard]] double speed(double t) const;
  [[nodiscard]] double accel(double t) const;
};

struct LeaderHandover {
  TransitionBlend blend;
  int old_leader = -1;
  int new_leader = -1;
};

struct SimVehicle {
  VehicleState state;
  IdmParams idm;
  StateHistory history;
  std::optional<LateralManeuver> lateral;
  std::optional<CubicMotion> track;  // position reference with feedback
  std::optional<VirtualLeader> virtual_leader;
  std::optional<LeaderHandover> handover;
  // Car-follows this vehicle by longitudinal position regardless of lane
  // (FIFO ordering).
  std::optional<int> projected_leader;
  bool ramp_end_obstacle = false;
  double last_lane_change_t = -1e9;

  // Inside the lateral segment of a lane change.
  [[nodiscard]] bool changing() const {
    return lateral && state.x >= lateral->poly.x_start;
  }
};

struct KeyRoles {
  int vr = -1;
  int vmc = -1;
  int vmf = -1;
  int vmr = -1;
  int vnf = -1;
  int vnr = -1;

  // VR, VMC, VMF, VMR, VNF, VNR; absent roles are -1.
  [[nodiscard]] std::array<int, 6> ids() const { return {vr, vmc, vmf, vmr, vnf, vnr}; }
};

struct CollisionEvent {
  double t = 0.0;
  int a = -1;
  int b = -1;
};

struct World {
  std::shared_ptr<const ScenarioConfig> cfg;
  std::int64_t step_count = 0;
  double t = 0.0;
  std::vector<SimVehicle> vehicles;
  KeyRoles roles;
  std::optional<CollisionEvent> collision;
  std::optional<double> merge_time;

  [[nodiscard]] const SimVehicle& vr() const { return vehicles.at(roles.vr); }
  [[nodiscard]] SimVehicle& vr() { return vehicles.at(roles.vr); }
  [[nodiscard]] double dt() const { return cfg->dt; }
};

// Platoons at the configured headways, kinds drawn by penetration rate, VR
// at the control-zone entry, roles labelled. Every follower's desired speed
// is set so that its spawn gap is an equilibrium gap.
World build_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

// Desired speed that makes (gap, speed) an IDM equilibrium.
double equilibrium_desired_speed(double gap, double speed, const IdmParams& p);

// Time to cover `distance` accelerating at `accel` from `speed` up to
// `top_speed`, then cruising.
double projected_arrival_time(double distance, double speed, double top_speed, double accel);

// Labels the six key roles relative to VR's projected arrival at the merge
// point; every other vehicle becomes Background.
void assign_roles(World& world);

struct LeaderInfo {
  int id = -1;  // -1 when no leader; -2 for the ramp-end obstacle
  double gap = 0.0;
  double speed = 0.0;
  double accel = 0.0;

  [[nodiscard]] bool exists() const { return id != -1; }
};

// Nearest vehicle ahead sharing a lane with i. A vehicle inside a lane change
// occupies both lanes.
LeaderInfo find_leader(const World& world, int i);
// Nearest vehicle behind i among those sharing `lane`.
int find_follower_in_lane(const World& world, int i, Lane lane);
int find_leader_in_lane(const World& world, int i, Lane lane);

// Undelayed model acceleration (IDM, or free road without a leader).
double nominal_accel(const SimVehicle& v, const LeaderInfo& leader);
LeaderInfo leader_info(const World& world, int i, int leader_id);

// Starts a quintic lane change of vehicle i over `duration` seconds at its
// current speed.
void start_lane_change(World& world, int i, Lane to, double duration);

// Advances the world by one dt. No-op once a collision is recorded.
void step(World& world);

}  // namespace hcomc
