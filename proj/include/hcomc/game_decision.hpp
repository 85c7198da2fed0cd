#pragma once

#include <array>
#include <optional>
#include <vector>

#include "hcomc/objectives.hpp"
#include "hcomc/traffic_models.hpp"

namespace hcomc {

enum class SvAction { ChangeLane = 0, KeepFollowing = 1 };
enum class FvAction { ChangeLane = 0, ConstantSpeed = 1, Accelerate = 2, Decelerate = 3 };
enum class FvStyle { Aggressive = 0, Normal = 1, Conservative = 2 };

inline constexpr std::size_t kSvActions = 2;
inline constexpr std::size_t kFvActions = 4;
inline constexpr std::size_t kFvStyles = 3;

struct ActionProfile {
  SvAction sv_action = SvAction::KeepFollowing;
  FvAction fv_action = FvAction::ConstantSpeed;
};

// Driving-style scaling of the follower's IDM parameters.
IdmParams apply_style(const IdmParams& base, FvStyle style);

struct FvTypeDistribution {
  std::array<double, kFvStyles> p{0.3, 0.4, 0.3};

  static FvTypeDistribution point_mass(FvStyle style);
  void validate() const;
};

// Costs (lower is better) of both players for every action pair and FV type.
struct PayoffMatrix {
  using Table = std::array<std::array<std::array<double, kFvStyles>, kFvActions>, kSvActions>;
  Table sv_cost{};
  Table fv_cost{};

  [[nodiscard]] double sv(SvAction s, FvAction f, FvStyle t) const;
  [[nodiscard]] double fv(SvAction s, FvAction f, FvStyle t) const;
};

struct SceneVehicle {
  double x = 0.0;
  double speed = 0.0;
  double length = 5.0;
  double width = 2.0;
  IdmParams params;
};

// Six-vehicle neighbourhood of a lane-change decision. FV is the follower in
// the target lane; its parameters are the "normal" style baseline.
struct LocalScene {
  SceneVehicle sv;
  std::optional<SceneVehicle> sv_leader;
  std::optional<SceneVehicle> sv_follower;
  std::optional<SceneVehicle> fv;
  std::optional<SceneVehicle> target_leader;
  std::optional<SceneVehicle> fv_follower;
  double current_lane_y = 3.75;
  double target_lane_y = 7.5;
};

struct GameParams {
  double w_safe = 1.0;
  double w_eff = 0.5;
  double w_comf = 0.2;
  double collision_penalty = 1e4;
  double horizon = 4.0;
  double dt = 0.1;
  double politeness_eta = 0.5;
  // FV's Accelerate/Decelerate magnitudes as fractions of its style's a and b.
  double fv_accel_fraction = 0.5;
  double fv_decel_fraction = 0.5;
  SafetyParams safety;
};

struct RolloutCosts {
  double sv = 0.0;
  double fv = 0.0;
  bool collision = false;
};

// Short-horizon simulation of one action pair. Collisions and gaps that
// cannot absorb an emergency stop are charged the collision penalty.
RolloutCosts rollout(const LocalScene& scene, const ActionProfile& profile, FvStyle style,
                     const GameParams& params);

// SV's cost for the action pair.
double rollout_payoff(const LocalScene& scene, const ActionProfile& profile, FvStyle style,
                      const GameParams& params);

PayoffMatrix build_payoff_matrix(const LocalScene& scene, const GameParams& params);

struct StackelbergDecision {
  SvAction sv_action = SvAction::KeepFollowing;
  // FV's anticipated best response to the chosen SV action, per style.
  std::array<FvAction, kFvStyles> fv_response{};
  // SV's expected cost of each of its actions.
  std::array<double, kSvActions> expected_cost{};
};

// FV's best response to `sv` when it is of type `style`; ties go to the
// lowest action index.
FvAction fv_best_response(const PayoffMatrix& payoff, SvAction sv, FvStyle style);

// Leader commits first, the follower best-responds per type, and the leader
// minimises its expected cost over the type distribution. Ties keep following.
StackelbergDecision sv_decide(const PayoffMatrix& payoff, const FvTypeDistribution& dist);
StackelbergDecision sv_decide(const LocalScene& scene, const FvTypeDistribution& dist,
                              const GameParams& params);

struct MixedEquilibrium {
  std::array<double, kSvActions> sv{};
  std::array<double, kFvActions> fv{};
  double sv_cost = 0.0;
  double fv_cost = 0.0;
};

// Nash equilibria of the 2x4 cost bimatrix for one FV type, by support
// enumeration (pure profiles first, then 2x2 supports). Returned in
// deterministic order; empty only for degenerate games.
std::vector<MixedEquilibrium> solve_mixed_equilibria(const PayoffMatrix& payoff, FvStyle style);

}  // namespace hcomc
