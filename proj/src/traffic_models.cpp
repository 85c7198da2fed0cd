#include "hcomc/traffic_models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hcomc {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::VR: return "VR";
    case Role::VMC: return "VMC";
    case Role::VMF: return "VMF";
    case Role::VMR: return "VMR";
    case Role::VNF: return "VNF";
    case Role::VNR: return "VNR";
    case Role::Background: return "BG";
  }
  return "?";
}

std::string_view to_string(VehicleKind kind) {
  return kind == VehicleKind::HDV ? "HDV" : "CAV";
}

std::string_view to_string(Lane lane) {
  switch (lane) {
    case Lane::Ramp: return "ramp";
    case Lane::Main1: return "main1";
    case Lane::Main2: return "main2";
  }
  return "?";
}

void IdmParams::validate() const {
  if (!(max_accel_a > 0 && desired_speed_v0 > 0 && min_gap_s0 > 0 &&
        safe_headway_Ts > 0 && comfort_decel_b > 0 && emergency_decel > 0)) {
    throw std::invalid_argument("IdmParams: all fields must be strictly positive");
  }
  if (!(accel_exponent_delta >= 1.0)) {
    throw std::invalid_argument("IdmParams: accel_exponent_delta must be >= 1");
  }
}

void HdvParams::validate() const {
  base.validate();
  if (tau_gap < 0 || tau_speed < 0 || tau_dspeed < 0) {
    throw std::invalid_argument("HdvParams: delays must be non-negative");
  }
  auto in_band = [](double f) { return f > 0.5 && f < 1.5; };
  if (!in_band(gap_error_factor) || !in_band(dspeed_error_factor)) {
    throw std::invalid_argument("HdvParams: error factors must lie in (0.5, 1.5)");
  }
}

void CavParams::validate() const {
  base.validate();
  if (cooling_factor_c < 0.0 || cooling_factor_c > 1.0) {
    throw std::invalid_argument("CavParams: cooling_factor_c must lie in [0, 1]");
  }
}

double LaneChangePoly::y(double x) const {
  const double u = x - x_start;
  const auto& a = coeffs;
  return a[0] + u * (a[1] + u * (a[2] + u * (a[3] + u * (a[4] + u * a[5]))));
}

double LaneChangePoly::dy(double x) const {
  const double u = x - x_start;
  const auto& a = coeffs;
  return a[1] + u * (2 * a[2] + u * (3 * a[3] + u * (4 * a[4] + u * 5 * a[5])));
}

double LaneChangePoly::d2y(double x) const {
  const double u = x - x_start;
  const auto& a = coeffs;
  return 2 * a[2] + u * (6 * a[3] + u * (12 * a[4] + u * 20 * a[5]));
}

double LaneChangePoly::y_clamped(double x) const {
  if (x <= x_start) return 0.0;
  if (x >= x_end) return lateral_offset_d;
  const double lo = std::min(0.0, lateral_offset_d);
  const double hi = std::max(0.0, lateral_offset_d);
  return std::clamp(y(x), lo, hi);
}

void StateHistory::push(const PerceptionSample& sample) {
  if (!samples_.empty() && sample.t < samples_.back().t) {
    throw std::invalid_argument("StateHistory: timestamps must be monotone");
  }
  samples_.push_back(sample);
  // Keep one sample at or before (latest - span).
  const double horizon = sample.t - span_;
  while (samples_.size() > 2 && samples_[1].t <= horizon) {
    samples_.pop_front();
  }
}

PerceptionSample StateHistory::at(double t) const {
  if (samples_.empty()) {
    throw std::logic_error("StateHistory: query on empty history");
  }
  if (t <= samples_.front().t) return samples_.front();
  if (t >= samples_.back().t) return samples_.back();
  auto hi = std::lower_bound(
      samples_.begin(), samples_.end(), t,
      [](const PerceptionSample& s, double value) { return s.t < value; });
  auto lo = std::prev(hi);
  const double span = hi->t - lo->t;
  const double w = span > 0 ? (t - lo->t) / span : 0.0;
  return {t, lo->gap + w * (hi->gap - lo->gap),
          lo->speed + w * (hi->speed - lo->speed),
          lo->dspeed + w * (hi->dspeed - lo->dspeed)};
}

double idm_accel(double gap, double speed, double dspeed, const IdmParams& p) {
  if (!(gap > 0.0)) {
    throw std::domain_error("idm_accel: non-positive gap " + std::to_string(gap));
  }
  const double interaction =
      speed * p.safe_headway_Ts +
      speed * dspeed / (2.0 * std::sqrt(p.max_accel_a * p.comfort_decel_b));
  const double s_star = p.min_gap_s0 + std::max(0.0, interaction);
  const double ratio = s_star / gap;
  const double a = p.max_accel_a *
                   (1.0 - std::pow(speed / p.desired_speed_v0, p.accel_exponent_delta) -
                    ratio * ratio);
  return std::clamp(a, -p.emergency_decel, p.max_accel_a);
}

double hdv_accel(const StateHistory& history, double now, const HdvParams& p) {
  const double gap = history.at(now - p.tau_gap).gap;
  const double speed = history.at(now - p.tau_speed).speed;
  const double dspeed = history.at(now - p.tau_dspeed).dspeed;
  return idm_accel(p.gap_error_factor * gap, speed, p.dspeed_error_factor * dspeed,
                   p.base);
}

double cah_accel(double gap, double speed, double dspeed, double leader_accel,
                 double max_accel) {
  const double leader_speed = speed - dspeed;
  const double a_lead = std::min(leader_accel, max_accel);
  const double denom = leader_speed * leader_speed - 2.0 * gap * a_lead;
  if (leader_speed * dspeed <= -2.0 * gap * a_lead && denom > 0.0) {
    return speed * speed * a_lead / denom;
  }
  const double closing = std::max(dspeed, 0.0);
  return a_lead - closing * closing / (2.0 * gap);
}

double cav_accel(double gap, double speed, double dspeed, double leader_accel,
                 const CavParams& p) {
  const double a_idm = idm_accel(gap, speed, dspeed, p.base);
  const double c = p.cooling_factor_c;
  if (c == 0.0) return a_idm;
  const double a_cah = cah_accel(gap, speed, dspeed, leader_accel, p.base.max_accel_a);
  const double b = p.base.comfort_decel_b;
  const double a = (1.0 - c) * a_idm + c * (a_cah + b * std::tanh((a_idm - a_cah) / b));
  return std::clamp(a, -p.base.emergency_decel, p.base.max_accel_a);
}

LaneChangePoly fit_quintic(double x_start, double x_end, double lateral_offset) {
  if (!(x_end > x_start)) {
    throw std::invalid_argument("fit_quintic: x_end must exceed x_start");
  }
  if (lateral_offset == 0.0) {
    throw std::invalid_argument("fit_quintic: lateral offset must be non-zero");
  }
  // y = d (10 u^3 - 15 u^4 + 6 u^5), u = (x - x_start) / L.
  const double len = x_end - x_start;
  const double d = lateral_offset;
  LaneChangePoly poly;
  poly.x_start = x_start;
  poly.x_end = x_end;
  poly.lateral_offset_d = d;
  poly.coeffs = {0.0,
                 0.0,
                 0.0,
                 10.0 * d / std::pow(len, 3),
                 -15.0 * d / std::pow(len, 4),
                 6.0 * d / std::pow(len, 5)};
  return poly;
}

Trajectory lc_trajectory(const LaneChangePoly& poly, const VehicleState& start_state,
                         const LongitudinalModel& accel_fn, double t0, double tf,
                         double dt) {
  if (!(tf > t0)) throw std::invalid_argument("lc_trajectory: tf must exceed t0");
  if (!(dt > 0.0)) throw std::invalid_argument("lc_trajectory: dt must be positive");

  Trajectory traj;
  traj.length = start_state.length;
  traj.width = start_state.width;

  auto sample = [&](double t, double x, double v, double a) {
    TrajectoryPoint pt;
    pt.t = t;
    pt.x = x;
    pt.speed = v;
    pt.accel = a;
    const bool inside = x > poly.x_start && x < poly.x_end;
    const double slope = inside ? poly.dy(x) : 0.0;
    const double curvature = inside ? poly.d2y(x) : 0.0;
    pt.y = start_state.y + poly.y_clamped(x);
    pt.lateral_speed = slope * v;
    pt.lateral_accel = curvature * v * v + slope * a;
    pt.heading = std::atan2(pt.lateral_speed, v);
    return pt;
  };

  const auto steps = static_cast<std::size_t>(std::ceil((tf - t0) / dt - 1e-9));
  traj.points.reserve(steps + 1);

  double t = t0;
  double x = start_state.x;
  double v = start_state.speed;
  double a = accel_fn(t, x, v);
  traj.points.push_back(sample(t, x, v, a));

  for (std::size_t k = 0; k < steps; ++k) {
    const double h = std::min(dt, tf - t);
    // Heun predictor-corrector: trapezoidal in both velocity and position.
    const double v_pred = v + a * h;
    const double x_pred = x + v * h + 0.5 * a * h * h;
    const double a_next = accel_fn(t + h, x_pred, v_pred);
    const double v_next = v + 0.5 * (a + a_next) * h;
    x += 0.5 * (v + v_next) * h;
    v = v_next;
    a = a_next;
    t = (k + 1 == steps) ? tf : t0 + static_cast<double>(k + 1) * dt;
    const bool last = k + 1 == steps;
    if (!last && (x > poly.x_end + 1e-9 || x < poly.x_start - 1e-9)) {
      traj.truncated = true;
      break;
    }
    traj.points.push_back(sample(t, x, v, a));
  }
  return traj;
}

}  // namespace hcomc
