#include "hcomc/objectives.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

namespace hcomc {

std::string_view to_string(GapChoice gap) {
  return gap == GapChoice::AheadOfVmc ? "ahead" : "behind";
}

std::string_view to_string(VmcMode mode) {
  switch (mode) {
    case VmcMode::NoCooperation: return "none";
    case VmcMode::LongitudinalCooperation: return "longitudinal";
    case VmcMode::LateralCooperation: return "lateral";
  }
  return "?";
}

void SafetyParams::validate() const {
  if (!(delay_T > 0 && emergency_decel_a_merg > 0 && min_distance_D > 0)) {
    throw std::invalid_argument("SafetyParams: all fields must be positive");
  }
}

double u_safe(double v_rear, double v_front, double d_cri, const SafetyParams& p) {
  const double denom = 2.0 * (d_cri - p.min_distance_D - v_rear * p.delay_T +
                              v_front * v_front / (2.0 * p.emergency_decel_a_merg));
  if (!(denom > 0.0)) {
    std::ostringstream msg;
    msg << "u_safe: gap " << d_cri << " m cannot absorb an emergency stop";
    throw InfeasibleGap(msg.str());
  }
  return v_rear * v_rear / denom;
}

double fuel_rate(double v, double a, const FuelModelParams& p) {
  const auto& Q = p.Q;
  const auto& R = p.R;
  const double cruise = Q[0] + v * (Q[1] + v * (Q[2] + v * Q[3]));
  const double accel = a > 0.0 ? a * (R[0] + v * (R[1] + v * R[2])) : 0.0;
  return std::max(0.0, cruise + accel);
}

double trajectory_fuel(const Trajectory& traj, const FuelModelParams& p) {
  double total = 0.0;
  for (std::size_t i = 1; i < traj.points.size(); ++i) {
    const auto& a = traj.points[i - 1];
    const auto& b = traj.points[i];
    // b.accel was applied over [a.t, b.t], so speed is linear in between.
    const double mid = 0.5 * (a.speed + b.speed);
    total += (b.t - a.t) / 6.0 *
             (fuel_rate(a.speed, b.accel, p) + 4.0 * fuel_rate(mid, b.accel, p) +
              fuel_rate(b.speed, b.accel, p));
  }
  return total;
}

double u_fuel(const Trajectory& vr_traj, const Trajectory& vmc_traj,
              const FuelModelParams& p) {
  return trajectory_fuel(vr_traj, p) + trajectory_fuel(vmc_traj, p);
}

double u_eff(const MergeAccels& before, const MergeAccels& after, double eta) {
  auto gain = [](const std::optional<double>& b, const std::optional<double>& a) {
    return (a && b) ? *a - *b : 0.0;
  };
  const double neighbours =
      gain(before.vmc, after.vmc) + gain(before.vnr, after.vnr) + gain(before.vmr, after.vmr);
  return (after.vr - before.vr) + eta * neighbours;
}

MergePlan select_unique(std::span<const MergePlan> pareto) {
  if (pareto.empty()) throw std::invalid_argument("select_unique: empty Pareto set");

  std::vector<const MergePlan*> pool;
  for (const auto& p : pareto) {
    if (p.feasible) pool.push_back(&p);
  }
  if (pool.empty()) {
    for (const auto& p : pareto) pool.push_back(&p);
  }

  auto by_safety = [](const MergePlan* a, const MergePlan* b) {
    if (a->objectives.u_safe != b->objectives.u_safe) {
      return a->objectives.u_safe < b->objectives.u_safe;
    }
    return a->decision < b->decision;
  };

  const auto safest = *std::min_element(pool.begin(), pool.end(), by_safety);
  if (safest->objectives.u_safe > kSafetyThreshold) return *safest;

  std::vector<const MergePlan*> safe;
  for (const auto* p : pool) {
    if (p->objectives.u_safe <= kSafetyThreshold) safe.push_back(p);
  }

  double eff_lo = safe.front()->objectives.u_eff * -1.0, eff_hi = eff_lo;
  double fuel_lo = safe.front()->objectives.u_fuel, fuel_hi = fuel_lo;
  for (const auto* p : safe) {
    eff_lo = std::min(eff_lo, -p->objectives.u_eff);
    eff_hi = std::max(eff_hi, -p->objectives.u_eff);
    fuel_lo = std::min(fuel_lo, p->objectives.u_fuel);
    fuel_hi = std::max(fuel_hi, p->objectives.u_fuel);
  }
  auto normalized = [](double v, double lo, double hi) {
    return hi > lo ? (v - lo) / (hi - lo) : 0.0;
  };
  auto score = [&](const MergePlan* p) {
    return normalized(-p->objectives.u_eff, eff_lo, eff_hi) +
           normalized(p->objectives.u_fuel, fuel_lo, fuel_hi);
  };

  const MergePlan* best = safe.front();
  double best_score = score(best);
  for (const auto* p : safe) {
    const double s = score(p);
    if (s < best_score || (s == best_score && by_safety(p, best))) {
      best = p;
      best_score = s;
    }
  }
  return *best;
}

}  // namespace hcomc
