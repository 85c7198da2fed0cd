#pragma once

#include <vector>

#include "hcomc/controllers.hpp"

namespace hcomc {

struct MetricsRow {
  // Smallest gap between VR and its lane-1 follower after merge completion;
  // NaN without a merge or a follower.
  double crit_dist = 0.0;
  double aver_acc = 0.0;
  // Seconds from merge completion (or run start) until the key vehicles stay
  // below the acceleration threshold for the whole window; censored at the
  // run end.
  double stab_time = 0.0;
  double lsrv = 0.0;
  double fuel = 0.0;
};

MetricsRow compute_metrics(const RunResult& result, const ScenarioConfig& cfg);

// Integral of (v_low - v)^+ * v over one sampled speed profile (trapezoid).
double low_speed_volume(const std::vector<double>& speeds, double dt, double v_low);

// First index from which every series stays below `threshold` in magnitude
// for `window_steps` further samples; series.front().size() when never.
std::size_t stabilization_index(const std::vector<std::vector<double>>& series,
                                std::size_t from, double threshold, std::size_t window_steps);

}  // namespace hcomc
