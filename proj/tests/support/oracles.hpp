#pragma once

// Reference implementations used only by tests. Each one is written from the
// model definitions directly and shares no code with the library.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "hcomc/collision.hpp"
#include "hcomc/merge_plan.hpp"
#include "hcomc/vehicle.hpp"

namespace oracle {

using Obj = std::array<double, 3>;

inline bool dominates(const Obj& a, const Obj& b) {
  bool strictly = false;
  for (int k = 0; k < 3; ++k) {
    if (a[k] > b[k]) return false;
    if (a[k] < b[k]) strictly = true;
  }
  return strictly;
}

// Peel fronts: a point belongs to the current front when no remaining point
// dominates it.
inline std::vector<std::vector<std::size_t>> brute_force_fronts(const std::vector<Obj>& pts) {
  std::vector<bool> taken(pts.size(), false);
  std::vector<std::vector<std::size_t>> fronts;
  std::size_t left = pts.size();
  while (left > 0) {
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (taken[i]) continue;
      bool dominated = false;
      for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
        if (j != i && !taken[j] && dominates(pts[j], pts[i])) dominated = true;
      }
      if (!dominated) front.push_back(i);
    }
    for (auto i : front) taken[i] = true;
    left -= front.size();
    fronts.push_back(std::move(front));
  }
  return fronts;
}

struct Rect {
  double cx, cy, heading, length, width;
};

inline std::array<std::array<double, 2>, 4> rect_corners(const Rect& r) {
  const double c = std::cos(r.heading), s = std::sin(r.heading);
  const double hl = 0.5 * r.length, hw = 0.5 * r.width;
  std::array<std::array<double, 2>, 4> out{};
  const double sx[4] = {-1, 1, 1, -1};
  const double sy[4] = {-1, -1, 1, 1};
  for (int k = 0; k < 4; ++k) {
    const double lx = sx[k] * hl, ly = sy[k] * hw;
    out[k] = {r.cx + c * lx - s * ly, r.cy + s * lx + c * ly};
  }
  return out;
}

// Separating-axis test on the four face normals; touching counts as overlap.
inline bool sat_overlap(const Rect& a, const Rect& b) {
  const auto ca = rect_corners(a), cb = rect_corners(b);
  for (const Rect* r : {&a, &b}) {
    for (double ang : {r->heading, r->heading + M_PI / 2}) {
      const double ax = std::cos(ang), ay = std::sin(ang);
      double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
      for (const auto& p : ca) {
        const double d = p[0] * ax + p[1] * ay;
        amin = std::min(amin, d);
        amax = std::max(amax, d);
      }
      for (const auto& p : cb) {
        const double d = p[0] * ax + p[1] * ay;
        bmin = std::min(bmin, d);
        bmax = std::max(bmax, d);
      }
      if (amax < bmin || bmax < amin) return false;
    }
  }
  return true;
}

// Smallest separation along any face normal, negative when overlapping.
inline double sat_margin(const Rect& a, const Rect& b) {
  const auto ca = rect_corners(a), cb = rect_corners(b);
  double best = -1e300;
  for (const Rect* r : {&a, &b}) {
    for (double ang : {r->heading, r->heading + M_PI / 2}) {
      const double ax = std::cos(ang), ay = std::sin(ang);
      double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
      for (const auto& p : ca) {
        const double d = p[0] * ax + p[1] * ay;
        amin = std::min(amin, d);
        amax = std::max(amax, d);
      }
      for (const auto& p : cb) {
        const double d = p[0] * ax + p[1] * ay;
        bmin = std::min(bmin, d);
        bmax = std::max(bmax, d);
      }
      best = std::max(best, std::max(bmin - amax, amin - bmax));
    }
  }
  return best;
}

inline hcomc::VehicleFootprint to_footprint(const Rect& r) {
  hcomc::VehicleFootprint f;
  f.center = {r.cx, r.cy};
  f.heading = r.heading;
  f.length = r.length;
  f.width = r.width;
  return f;
}

// Straight-line motion with constant speed and yaw rate, known in closed form
// so that it can be sampled at any resolution.
struct Motion {
  double x0, y0, vx, vy, h0, yaw_rate, length, width;

  [[nodiscard]] Rect at(double t) const {
    return {x0 + vx * t, y0 + vy * t, h0 + yaw_rate * t, length, width};
  }
  [[nodiscard]] hcomc::Trajectory sample(double t_end, double dt) const {
    hcomc::Trajectory tr;
    tr.length = length;
    tr.width = width;
    const auto n = static_cast<int>(std::llround(t_end / dt));
    for (int k = 0; k <= n; ++k) {
      const double t = k * dt;
      const Rect r = at(t);
      hcomc::TrajectoryPoint p;
      p.t = t;
      p.x = r.cx;
      p.y = r.cy;
      p.heading = r.heading;
      p.speed = std::hypot(vx, vy);
      tr.points.push_back(p);
    }
    return tr;
  }
};

struct MotionPair {
  Motion a;
  Motion b;
  double t_end;
};

// Earliest overlap time of two motions sampled at `dt`, or nullopt.
inline std::optional<double> dense_first_overlap(const MotionPair& s, double dt) {
  const auto n = static_cast<long>(std::llround(s.t_end / dt));
  for (long k = 0; k <= n; ++k) {
    const double t = k * dt;
    if (sat_overlap(s.a.at(t), s.b.at(t))) return t;
  }
  return std::nullopt;
}

inline double dense_min_margin(const MotionPair& s, double dt) {
  double m = 1e300;
  const auto n = static_cast<long>(std::llround(s.t_end / dt));
  for (long k = 0; k <= n; ++k) {
    const double t = k * dt;
    m = std::min(m, sat_margin(s.a.at(t), s.b.at(t)));
  }
  return m;
}

// Highway-like encounters: rear-end approaches, adjacent-lane passes and
// lane changes across a neighbour. Relative speeds stay below 8 m/s. A case
// is kept only when it is a clear hit (penetration of at least 1 m) or a
// clear miss (at least 0.2 m of clearance) under dense sampling, so that the
// verdict does not hinge on sub-step grazing contact.
inline std::vector<MotionPair> encounter_corpus(std::size_t count, std::uint64_t seed,
                                                double dense_dt) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<MotionPair> out;
  std::size_t hits = 0, misses = 0;
  while (out.size() < count) {
    const int kind = static_cast<int>(u(rng) * 3);
    const double v = 15 + 15 * u(rng);
    Motion a{0, 0, v, 0, 0, 0, 4.5 + u(rng), 1.8 + 0.3 * u(rng)};
    Motion b{12 + 20 * u(rng), 0, v - 8 * u(rng), 0, 0, 0, 4.5 + u(rng), 1.8 + 0.3 * u(rng)};
    if (kind == 1) {
      b.y0 = 2.0 + 2.5 * u(rng);  // neighbour lane, possibly too close
      b.x0 = -10 + 30 * u(rng);
    } else if (kind == 2) {
      // a drifts sideways into b's lane with a small yaw.
      b.y0 = 3.75;
      b.x0 = -15 + 40 * u(rng);
      a.vy = 0.8 + 0.8 * u(rng);
      a.h0 = std::atan2(a.vy, a.vx);
    }
    MotionPair p{a, b, 5.0};
    const double m = dense_min_margin(p, dense_dt);
    const bool hit = m <= -1.0, miss = m >= 0.2;
    if (hit && hits < (count + 1) / 2) {
      ++hits;
      out.push_back(p);
    } else if (miss && misses < count / 2) {
      ++misses;
      out.push_back(p);
    }
  }
  return out;
}

// Written out from the two-branch rule: above the threshold take the
// smallest critical acceleration; otherwise min-max normalise fuel and
// negative incentive over the safe subset and take the smallest sum. Ties go
// to the smaller u_safe, then the smaller decision.
inline hcomc::MergePlan hand_select(const std::vector<hcomc::MergePlan>& set) {
  std::vector<hcomc::MergePlan> pool;
  for (const auto& p : set) {
    if (p.feasible) pool.push_back(p);
  }
  if (pool.empty()) pool = set;
  auto tie = [](const hcomc::MergePlan& a, const hcomc::MergePlan& b) {
    if (a.objectives.u_safe != b.objectives.u_safe) return a.objectives.u_safe < b.objectives.u_safe;
    return a.decision < b.decision;
  };
  bool any_safe = false;
  for (const auto& p : pool) any_safe = any_safe || p.objectives.u_safe <= 4.0;
  if (!any_safe) {
    hcomc::MergePlan best = pool[0];
    for (const auto& p : pool) {
      if (tie(p, best)) best = p;
    }
    return best;
  }
  std::vector<hcomc::MergePlan> safe;
  for (const auto& p : pool) {
    if (p.objectives.u_safe <= 4.0) safe.push_back(p);
  }
  double f_lo = 1e300, f_hi = -1e300, e_lo = 1e300, e_hi = -1e300;
  for (const auto& p : safe) {
    f_lo = std::min(f_lo, p.objectives.u_fuel);
    f_hi = std::max(f_hi, p.objectives.u_fuel);
    e_lo = std::min(e_lo, -p.objectives.u_eff);
    e_hi = std::max(e_hi, -p.objectives.u_eff);
  }
  std::vector<double> score;
  for (const auto& p : safe) {
    const double f = f_hi > f_lo ? (p.objectives.u_fuel - f_lo) / (f_hi - f_lo) : 0.0;
    const double e = e_hi > e_lo ? (-p.objectives.u_eff - e_lo) / (e_hi - e_lo) : 0.0;
    score.push_back(f + e);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < safe.size(); ++i) {
    if (score[i] < score[best] || (score[i] == score[best] && tie(safe[i], safe[best]))) best = i;
  }
  return safe[best];
}

}  // namespace oracle
