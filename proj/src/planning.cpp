#include "hcomc/planning.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hcomc {

double CubicMotion::position(double t) const {
  const double s = t - t_begin;
  return coeffs[0] + s * (coeffs[1] + s * (coeffs[2] + s * coeffs[3]));
}

double CubicMotion::speed(double t) const {
  const double s = t - t_begin;
  return coeffs[1] + s * (2.0 * coeffs[2] + s * 3.0 * coeffs[3]);
}

double CubicMotion::accel(double t) const {
  return 2.0 * coeffs[2] + 6.0 * coeffs[3] * (t - t_begin);
}

// Acceleration is affine in t, so the extremes sit at the endpoints.
double CubicMotion::peak_accel() const { return std::max(accel(t_begin), accel(t_end)); }
double CubicMotion::min_accel() const { return std::min(accel(t_begin), accel(t_end)); }

CubicMotion solve_cubic_bvp(double x0, double v0, double xf, double vf, double t0,
                            double tf, double min_horizon) {
  const double T = tf - t0;
  if (!(T >= min_horizon)) {
    std::ostringstream msg;
    msg << "solve_cubic_bvp: horizon " << T << " s below minimum " << min_horizon << " s";
    throw IllConditionedHorizon(msg.str());
  }
  // Closed-form inverse of the 4x4 boundary system in shifted time.
  const double dx = xf - x0;
  CubicMotion m;
  m.t_begin = t0;
  m.t_end = tf;
  m.coeffs = {x0, v0, (3.0 * dx - (2.0 * v0 + vf) * T) / (T * T),
              (-2.0 * dx + (v0 + vf) * T) / (T * T * T)};
  return m;
}

namespace {

CubicMotion plan_virtual(const char* what, const KinematicState& start, double t0,
                         const KinematicState& target, double tf,
                         const AccelBounds& bounds) {
  CubicMotion m;
  try {
    m = solve_cubic_bvp(start.x, start.v, target.x, target.v, t0, tf);
  } catch (const IllConditionedHorizon& e) {
    throw InfeasiblePlan(std::string(what) + ": " + e.what());
  }
  const double hi = m.peak_accel();
  const double lo = m.min_accel();
  if (hi > bounds.max_accel + 1e-9 || lo < -bounds.max_decel - 1e-9) {
    std::ostringstream msg;
    msg << what << ": required acceleration [" << lo << ", " << hi
        << "] outside bounds [" << -bounds.max_decel << ", " << bounds.max_accel << "]";
    throw InfeasiblePlan(msg.str());
  }
  return m;
}

}  // namespace

CubicMotion plan_longitudinal_vr(const KinematicState& leader_at_t0, double t0,
                                 const KinematicState& vr_target, double tf,
                                 const AccelBounds& bounds) {
  return plan_virtual("plan_longitudinal_vr", leader_at_t0, t0, vr_target, tf, bounds);
}

CubicMotion plan_lateral_vmc(const KinematicState& vnf_at_t0, double t0,
                             const KinematicState& vmc_target, double tf,
                             const AccelBounds& bounds) {
  return plan_virtual("plan_lateral_vmc", vnf_at_t0, t0, vmc_target, tf, bounds);
}

TransitionBlend TransitionBlend::calibrate(double t_begin, double t_end) {
  if (!(t_end > t_begin)) {
    throw std::invalid_argument("TransitionBlend: t_end must exceed t_begin");
  }
  TransitionBlend b;
  b.t_begin = t_begin;
  b.t_end = t_end;
  b.lambda = 6.0 / (t_end - t_begin);
  b.gamma = b.lambda * t_begin + 3.0;
  return b;
}

double TransitionBlend::psi(double t) const {
  return 0.5 * (std::tanh(lambda * t - gamma) + 1.0);
}

double blended_accel(double a_ori, double a_new, double tau, const TransitionBlend& blend) {
  const double t = std::clamp(tau, blend.t_begin, blend.t_end);
  const double w = blend.psi(t);
  return w * a_new + (1.0 - w) * a_ori;
}

}  // namespace hcomc
