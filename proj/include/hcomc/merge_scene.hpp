#pragma once

#include <memory>
#include <optional>
#include <string>

#include "hcomc/merge_plan.hpp"
#include "hcomc/objectives.hpp"
#include "hcomc/optimizer.hpp"
#include "hcomc/world.hpp"

namespace hcomc {

// VR's required state when its lane change completes.
struct MergeTarget {
  double x = 0.0;
  double v = 0.0;
  double t = 0.0;
};

// VR's state at `tf` for the chosen lane-1 slot, bounding vehicles moving at
// constant speed. Under cooperation the yielding CAV is not a bound, and a
// VMC leaving lane 1 widens the slot to VMF..VMR. Aims one desired gap behind the slot's front vehicle (the
// slot center when the slot is too short for that), then clamps to what VR
// can reach under the plan bounds. Throws InfeasiblePlan when no reachable
// point keeps a desired gap to both ends. The target speed is that of the
// front vehicle.
MergeTarget merge_target(const World& world, GapChoice gap, VmcMode mode, double tf);

struct InstalledPlan {
  DecisionVector decision;
  double t0 = 0.0;
  double tf = 0.0;
  MergeTarget target;
  CubicMotion vr_reference;
  LaneChangePoly vr_lane_change;
  int yielder = -1;  // follows the lane-1 virtual vehicle
  std::optional<CubicMotion> lane1_virtual;
  std::optional<CubicMotion> lane2_virtual;
};

// Writes the plan into the world: VR's reference and lane change, the
// virtual leaders of the cooperating vehicles and VMC's lane change and
// leader handover. Throws InfeasiblePlan when the plan cannot be built.
InstalledPlan install_merge_plan(World& world, const DecisionVector& decision);

struct EvaluationDetail {
  MergePlan plan;
  std::string reason;  // empty when feasible
  Trajectory vr;
  Trajectory vmc;
  Trajectory vmr;
  std::optional<double> merge_time;
  std::optional<double> d_cri;
  MergeAccels before;
  MergeAccels after;
};

// Installs the decision on a copy of the snapshot and simulates it until
// shortly after merge completion.
EvaluationDetail evaluate_detailed(const World& snapshot, const DecisionVector& decision);
MergePlan evaluate(const World& snapshot, const DecisionVector& decision);

Evaluator make_evaluator(std::shared_ptr<const World> snapshot);

// Model accelerations of VR and its neighbours in the current world.
MergeAccels key_accels(const World& world);

}  // namespace hcomc
