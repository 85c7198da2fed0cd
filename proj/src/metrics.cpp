#include "hcomc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hcomc/objectives.hpp"

namespace hcomc {

double low_speed_volume(const std::vector<double>& speeds, double dt, double v_low) {
  auto f = [v_low](double v) { return std::max(0.0, v_low - v) * v; };
  double total = 0.0;
  for (std::size_t k = 1; k < speeds.size(); ++k) {
    total += 0.5 * dt * (f(speeds[k - 1]) + f(speeds[k]));
  }
  return total;
}

std::size_t stabilization_index(const std::vector<std::vector<double>>& series,
                                std::size_t from, double threshold, std::size_t window_steps) {
  if (series.empty()) return from;
  const std::size_t n = series.front().size();
  std::size_t run = 0;  // consecutive calm samples ending at k
  for (std::size_t k = from; k < n; ++k) {
    bool calm = true;
    for (const auto& s : series) calm = calm && std::abs(s[k]) < threshold;
    run = calm ? run + 1 : 0;
    if (run > window_steps) return k - window_steps;
  }
  return n;
}

MetricsRow compute_metrics(const RunResult& r, const ScenarioConfig& cfg) {
  MetricsRow m;
  const std::size_t steps = r.steps();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<int> keys;
  for (int id : r.roles.ids()) {
    if (id >= 0) keys.push_back(id);
  }

  const std::size_t merge_step =
      r.merge_time ? static_cast<std::size_t>(std::llround(*r.merge_time / r.dt)) : 0;

  // Critical distance.
  m.crit_dist = nan;
  if (r.merge_time) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = merge_step; k < steps; ++k) {
      const auto& vr = r.at(k, r.roles.vr);
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t id = 0; id < r.vehicle_count; ++id) {
        const auto& o = r.at(k, static_cast<int>(id));
        if (static_cast<int>(id) == r.roles.vr || o.lane != Lane::Main1 || o.x >= vr.x) continue;
        nearest = std::min(nearest, vr.x - o.x - 0.5 * (r.lengths[id] + r.lengths[r.roles.vr]));
      }
      best = std::min(best, nearest);
    }
    if (std::isfinite(best)) m.crit_dist = best;
  }

  // Average absolute acceleration of the key vehicles.
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    for (int id : keys) {
      sum += std::abs(r.at(k, id).a);
      ++count;
    }
  }
  m.aver_acc = count ? sum / static_cast<double>(count) : 0.0;

  // Stabilisation time.
  std::vector<std::vector<double>> series;
  for (int id : keys) {
    std::vector<double> a(steps);
    for (std::size_t k = 0; k < steps; ++k) a[k] = r.at(k, id).a;
    series.push_back(std::move(a));
  }
  const auto window = static_cast<std::size_t>(std::llround(cfg.metrics.stab_window / r.dt));
  const std::size_t stable = stabilization_index(series, merge_step, cfg.metrics.stab_accel, window);
  const std::size_t last = steps == 0 ? 0 : steps - 1;
  m.stab_time = static_cast<double>(std::min(stable, last) - std::min(merge_step, last)) * r.dt;

  // Low-speed region volume over all vehicles.
  m.lsrv = 0.0;
  for (std::size_t id = 0; id < r.vehicle_count; ++id) {
    std::vector<double> v(steps);
    for (std::size_t k = 0; k < steps; ++k) v[k] = r.at(k, static_cast<int>(id)).v;
    m.lsrv += low_speed_volume(v, r.dt, cfg.metrics.v_low);
  }

  // Fuel of the key vehicles.
  m.fuel = 0.0;
  for (int id : keys) {
    Trajectory t;
    for (std::size_t k = 0; k < steps; ++k) {
      const auto& row = r.at(k, id);
      t.points.push_back({row.t, row.x, row.y, row.v, row.a, 0.0, 0.0, 0.0});
    }
    m.fuel += trajectory_fuel(t, cfg.fuel);
  }
  return m;
}

}  // namespace hcomc
