#pragma once

#include <array>
#include <stdexcept>

namespace hcomc {

struct KinematicState {
  double x = 0.0;
  double v = 0.0;
};

// Cubic x(t) = b0 + b1 s + b2 s^2 + b3 s^3 with s = t - t_begin.
struct CubicMotion {
  std::array<double, 4> coeffs{};
  double t_begin = 0.0;
  double t_end = 1.0;

  [[nodiscard]] double position(double t) const;
  [[nodiscard]] double speed(double t) const;
  [[nodiscard]] double accel(double t) const;
  [[nodiscard]] double peak_accel() const;
  [[nodiscard]] double min_accel() const;
};

struct AccelBounds {
  double max_accel = 1.4;
  double max_decel = 6.0;
};

class IllConditionedHorizon : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InfeasiblePlan : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kMinPlanningHorizon = 0.5;

// Position and speed matched at both ends of [t0, tf].
CubicMotion solve_cubic_bvp(double x0, double v0, double xf, double vf, double t0,
                            double tf, double min_horizon = kMinPlanningHorizon);

// Virtual vehicle in main lane 1: starts on the state of the yielding
// vehicle's current leader and ends on VR's required merge state. Its
// acceleration must stay inside `bounds` everywhere on the horizon.
CubicMotion plan_longitudinal_vr(const KinematicState& leader_at_t0, double t0,
                                 const KinematicState& vr_target, double tf,
                                 const AccelBounds& bounds);

// Virtual vehicle in main lane 2: starts on VNF's state and ends on VMC's
// state once VMC has moved over.
CubicMotion plan_lateral_vmc(const KinematicState& vnf_at_t0, double t0,
                             const KinematicState& vmc_target, double tf,
                             const AccelBounds& bounds);

// psi(t) = (tanh(lambda t - gamma) + 1) / 2 over [t_begin, t_end].
struct TransitionBlend {
  double lambda = 1.0;
  double gamma = 0.0;
  double t_begin = 0.0;
  double t_end = 1.0;

  // lambda t_begin - gamma = -3 and lambda t_end - gamma = +3.
  static TransitionBlend calibrate(double t_begin, double t_end);
  [[nodiscard]] double psi(double t) const;
};

// Leader-handover blend; tau is clamped to the blend window.
double blended_accel(double a_ori, double a_new, double tau, const TransitionBlend& blend);

}  // namespace hcomc
