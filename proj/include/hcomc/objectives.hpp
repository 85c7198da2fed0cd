#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>

#include "hcomc/merge_plan.hpp"
#include "hcomc/vehicle.hpp"

namespace hcomc {

struct SafetyParams {
  double delay_T = 1.0;
  double emergency_decel_a_merg = 6.0;
  double min_distance_D = 2.0;

  void validate() const;
};

// Polynomial fuel-rate model: cruise term [1 v v^2 v^3] Q^T plus an
// acceleration term a [1 v v^2] R^T. Defaults are a published fit for a
// mid-size passenger car, converted from mL/s to L/s.
struct FuelModelParams {
  std::array<double, 4> Q{0.1569e-3, 2.450e-5, -7.415e-7, 5.975e-8};
  std::array<double, 3> R{0.07224e-3, 9.681e-5, 1.075e-6};
};

class InfeasibleGap : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Critical acceleration the rear vehicle needs to avoid a rear-end collision
// if the front vehicle brakes at emergency_decel_a_merg.
double u_safe(double v_rear, double v_front, double d_cri, const SafetyParams& p);

// L/s. The acceleration term is gated to a >= 0 and the total floored at 0.
double fuel_rate(double v, double a, const FuelModelParams& p);

// Integral of fuel_rate along one trajectory. Each point's accel is the one
// held over the interval ending at it, as the world records it; Simpson's
// rule per interval.
double trajectory_fuel(const Trajectory& traj, const FuelModelParams& p);

// Total fuel of VR and VMC over their trajectories.
double u_fuel(const Trajectory& vr_traj, const Trajectory& vmc_traj,
              const FuelModelParams& p);

// Model accelerations of VR and its affected neighbours; absent neighbours
// are left empty.
struct MergeAccels {
  double vr = 0.0;
  std::optional<double> vmc;
  std::optional<double> vnr;
  std::optional<double> vmr;
};

// Acceleration incentive: (VR gain) + eta * sum of neighbour gains, where a
// gain is after-minus-before. Neighbours missing on either side contribute 0.
double u_eff(const MergeAccels& before, const MergeAccels& after, double eta);

inline constexpr double kSafetyThreshold = 4.0;

// Unique plan from a Pareto set. If every plan needs more than 4 m/s^2 of
// critical acceleration, the smallest u_safe wins; otherwise fuel and -u_eff
// are min-max normalised over the u_safe <= 4 subset and their sum minimised.
// Infeasible plans are ignored when any feasible plan is present.
// Throws std::invalid_argument on an empty set.
MergePlan select_unique(std::span<const MergePlan> pareto);

}  // namespace hcomc
