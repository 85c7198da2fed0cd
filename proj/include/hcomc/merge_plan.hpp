#pragma once

#include <array>
#include <compare>
#include <limits>
#include <string_view>

namespace hcomc {

// Which lane-1 slot VR targets: between VMF and VMC, or between VMC and VMR.
enum class GapChoice { AheadOfVmc = 0, BehindVmc = 1 };

enum class VmcMode { NoCooperation = 0, LongitudinalCooperation = 1, LateralCooperation = 2 };

std::string_view to_string(GapChoice gap);
std::string_view to_string(VmcMode mode);

struct DecisionVector {
  GapChoice gap = GapChoice::AheadOfVmc;
  // Seconds from the planning snapshot until VR completes its lane change.
  double merge_end_time = 10.0;
  VmcMode vmc_mode = VmcMode::NoCooperation;

  auto operator<=>(const DecisionVector&) const = default;
};

// u_eff is the acceleration incentive (larger is better); the optimiser
// minimises (u_safe, u_fuel, -u_eff).
struct ObjectiveVector {
  double u_safe = 0.0;
  double u_fuel = 0.0;
  double u_eff = 0.0;

  [[nodiscard]] std::array<double, 3> minimized() const { return {u_safe, u_fuel, -u_eff}; }
};

inline constexpr double kPenaltyObjective = 1e6;

inline ObjectiveVector penalty_objectives() {
  return {kPenaltyObjective, kPenaltyObjective, -kPenaltyObjective};
}

struct MergePlan {
  DecisionVector decision;
  ObjectiveVector objectives;
  bool feasible = false;
  int rank = 0;
  double crowding = 0.0;
};

}  // namespace hcomc
