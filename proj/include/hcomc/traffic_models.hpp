#pragma once

#include <array>
#include <deque>
#include <functional>

#include "hcomc/vehicle.hpp"

namespace hcomc {

// Intelligent driver model parameters. `emergency_decel` is the clamp applied
// after model evaluation, not an IDM parameter proper.
struct IdmParams {
  double max_accel_a = 1.4;
  double desired_speed_v0 = 33.3;
  double accel_exponent_delta = 4.0;
  double min_gap_s0 = 2.0;
  double safe_headway_Ts = 1.5;
  double comfort_decel_b = 2.0;
  double emergency_decel = 6.0;

  void validate() const;
};

// Human driver: reaction delays per perceived quantity and multiplicative
// estimation errors on gap and approach rate.
struct HdvParams {
  IdmParams base;
  double tau_gap = 0.5;
  double tau_speed = 0.5;
  double tau_dspeed = 0.5;
  double gap_error_factor = 1.0;
  double dspeed_error_factor = 1.0;

  void validate() const;
};

struct CavParams {
  IdmParams base;
  double cooling_factor_c = 0.99;

  void validate() const;
};

// Quintic lateral path y(x). Coefficients act on the local coordinate
// (x - x_start) so that evaluation stays well conditioned far from the origin.
struct LaneChangePoly {
  std::array<double, 6> coeffs{};
  double x_start = 0.0;
  double x_end = 1.0;
  double lateral_offset_d = 0.0;

  [[nodiscard]] double y(double x) const;
  [[nodiscard]] double dy(double x) const;
  [[nodiscard]] double d2y(double x) const;
  // y(x) limited to the segment between 0 and the lateral offset.
  [[nodiscard]] double y_clamped(double x) const;
};

struct PerceptionSample {
  double t = 0.0;
  double gap = 0.0;
  double speed = 0.0;
  double dspeed = 0.0;
};

// Time-stamped perception record used to realise reaction delays. Samples
// older than the retention span are dropped, keeping at least one sample that
// precedes the span so interpolation at (now - span) stays exact.
class StateHistory {
 public:
  explicit StateHistory(double span = 2.0) : span_(span) {}

  void push(const PerceptionSample& sample);
  // Linear interpolation; clamps to the first/last sample outside the record.
  [[nodiscard]] PerceptionSample at(double t) const;
  [[nodiscard]] bool empty() const { return samples_.empty(); }
  [[nodiscard]] std::size_t size() const { return samples_.size(); }
  [[nodiscard]] double span() const { return span_; }

 private:
  double span_;
  std::deque<PerceptionSample> samples_;
};

// IDM desired acceleration, clamped to [-emergency_decel, max_accel_a].
// dspeed is the approach rate (own speed minus leader speed).
// Throws std::domain_error for gap <= 0.
double idm_accel(double gap, double speed, double dspeed, const IdmParams& p);

// Delayed and error-scaled IDM evaluation for human drivers.
double hdv_accel(const StateHistory& history, double now, const HdvParams& p);

// Constant-acceleration heuristic: the highest acceleration that avoids a
// crash if the leader keeps its current acceleration (bounded by max_accel).
double cah_accel(double gap, double speed, double dspeed, double leader_accel,
                 double max_accel);

// IDM blended with the CAH by the cooling factor.
double cav_accel(double gap, double speed, double dspeed, double leader_accel,
                 const CavParams& p);

// Smoothstep quintic with zero slope and curvature at both ends.
// Throws std::invalid_argument if x_end <= x_start or lateral_offset == 0.
LaneChangePoly fit_quintic(double x_start, double x_end, double lateral_offset);

// Longitudinal model evaluated along a lane change: (t, x, v) -> accel.
using LongitudinalModel = std::function<double(double t, double x, double v)>;

// Integrates the longitudinal model with Heun's (trapezoidal) rule and maps
// x(t) through the lateral polynomial. y is offset by `start_state.y`.
Trajectory lc_trajectory(const LaneChangePoly& poly, const VehicleState& start_state,
                         const LongitudinalModel& accel_fn, double t0, double tf,
                         double dt);

}  // namespace hcomc
