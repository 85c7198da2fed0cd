#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hcomc/merge_scene.hpp"
#include "hcomc/world.hpp"

namespace hcomc {

struct TrajectoryRow {
  double t = 0.0;
  int id = 0;
  Role role = Role::Background;
  VehicleKind kind = VehicleKind::CAV;
  Lane lane = Lane::Main1;
  double x = 0.0;
  double y = 0.0;
  double v = 0.0;
  double a = 0.0;
};

struct RunResult {
  std::string condition;
  ControllerKind controller = ControllerKind::Hcomc;
  OptimizerKind optimizer = OptimizerKind::Nsga2;
  std::uint64_t seed = 0;
  double dt = 0.1;

  // Step-major: rows[k * vehicle_count + id].
  std::vector<TrajectoryRow> rows;
  std::size_t vehicle_count = 0;
  std::vector<double> lengths;
  KeyRoles roles;

  std::optional<double> merge_time;
  std::optional<CollisionEvent> collision;
  std::optional<double> forced_stop_time;
  std::optional<MergePlan> executed_plan;
  std::vector<MergePlan> pareto;
  // Scalarised cost of the executed plan under the fixed reference bounds.
  std::optional<double> plan_cost;
  int planning_attempts = 0;
  double end_time = 0.0;

  [[nodiscard]] std::size_t steps() const {
    return vehicle_count == 0 ? 0 : rows.size() / vehicle_count;
  }
  [[nodiscard]] const TrajectoryRow& at(std::size_t step, int id) const {
    return rows[step * vehicle_count + static_cast<std::size_t>(id)];
  }
};

struct PlanOutcome {
  MergePlan chosen;
  std::vector<MergePlan> pareto;
  double cost = 0.0;
};

// Runs the configured optimiser on a frozen snapshot and picks one plan.
PlanOutcome plan_merge(const World& snapshot, OptimizerKind optimizer, std::uint64_t seed);

// VR's place in the first-in-first-out order: the lane-1 vehicles projected
// (at current speed) to reach the merge point just before and just after VR.
// On equal times the mainline vehicle goes first.
struct FifoSlot {
  int leader = -1;
  int successor = -1;
};
FifoSlot fifo_slot(const World& world);

RunResult run_hcomc(const ScenarioConfig& cfg, std::uint64_t seed);
RunResult run_fifo(const ScenarioConfig& cfg, std::uint64_t seed);
// Dispatches on cfg.controller with cfg.seed.
RunResult run_scenario(const ScenarioConfig& cfg);

}  // namespace hcomc
