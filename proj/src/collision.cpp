#include "hcomc/collision.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hcomc {
namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// p is collinear with segment s; true if it lies within the segment's box.
bool on_segment(const Segment2D& s, const Point2& p) {
  return std::min(s.p1.x, s.p2.x) <= p.x && p.x <= std::max(s.p1.x, s.p2.x) &&
         std::min(s.p1.y, s.p2.y) <= p.y && p.y <= std::max(s.p1.y, s.p2.y);
}

}  // namespace

std::array<Point2, 4> VehicleFootprint::corners() const {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  auto at = [&](double lon, double lat) {
    return Point2{center.x + lon * c - lat * s, center.y + lon * s + lat * c};
  };
  return {at(-hl, -hw), at(hl, -hw), at(hl, hw), at(-hl, hw)};
}

std::array<Segment2D, 4> VehicleFootprint::edges() const {
  const auto p = corners();
  return {Segment2D{p[0], p[1]}, Segment2D{p[1], p[2]}, Segment2D{p[2], p[3]},
          Segment2D{p[3], p[0]}};
}

bool VehicleFootprint::contains(const Point2& p) const {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  const double dx = p.x - center.x;
  const double dy = p.y - center.y;
  const double lon = dx * c + dy * s;
  const double lat = -dx * s + dy * c;
  return std::abs(lon) <= 0.5 * length && std::abs(lat) <= 0.5 * width;
}

VehicleFootprint footprint_of(const TrajectoryPoint& pt, double length, double width) {
  return {{pt.x, pt.y}, pt.heading, length, width};
}

VehicleFootprint footprint_of(const VehicleState& state) {
  return {{state.x, state.y}, state.heading, state.length, state.width};
}

bool quick_reject(const Segment2D& a, const Segment2D& b) {
  return std::max(a.p1.x, a.p2.x) >= std::min(b.p1.x, b.p2.x) &&
         std::max(b.p1.x, b.p2.x) >= std::min(a.p1.x, a.p2.x) &&
         std::max(a.p1.y, a.p2.y) >= std::min(b.p1.y, b.p2.y) &&
         std::max(b.p1.y, b.p2.y) >= std::min(a.p1.y, a.p2.y);
}

bool straddle_intersect(const Segment2D& a, const Segment2D& b) {
  // Signs of the endpoints of one segment relative to the other's line.
  const double d1 = cross(b.p1, b.p2, a.p1);
  const double d2 = cross(b.p1, b.p2, a.p2);
  const double d3 = cross(a.p1, a.p2, b.p1);
  const double d4 = cross(a.p1, a.p2, b.p2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  return (d1 == 0 && on_segment(b, a.p1)) || (d2 == 0 && on_segment(b, a.p2)) ||
         (d3 == 0 && on_segment(a, b.p1)) || (d4 == 0 && on_segment(a, b.p2));
}

bool footprints_collide(const VehicleFootprint& f1, const VehicleFootprint& f2) {
  const auto e1 = f1.edges();
  const auto e2 = f2.edges();
  for (const auto& a : e1) {
    for (const auto& b : e2) {
      if (quick_reject(a, b) && straddle_intersect(a, b)) return true;
    }
  }
  return f1.contains(f2.center) || f2.contains(f1.center);
}

std::optional<double> trajectories_collide(const Trajectory& t1, const Trajectory& t2) {
  if (t1.empty() || t2.empty()) return std::nullopt;
  const double dt1 = t1.dt();
  const double dt2 = t2.dt();
  const double dt = std::max(dt1, dt2);
  if (t1.points.size() > 1 && t2.points.size() > 1 && std::abs(dt1 - dt2) > 1e-9) {
    throw std::invalid_argument("trajectories_collide: mismatched sample spacing");
  }
  const double offset = t2.points.front().t - t1.points.front().t;
  long shift = 0;
  if (dt > 0) {
    const double steps = offset / dt;
    shift = std::lround(steps);
    if (std::abs(steps - static_cast<double>(shift)) > 1e-6) {
      throw std::invalid_argument("trajectories_collide: timebases out of phase");
    }
  } else if (std::abs(offset) > 1e-9) {
    throw std::invalid_argument("trajectories_collide: timebases out of phase");
  }
  // Index i in t1 pairs with i - shift in t2.
  const long n1 = static_cast<long>(t1.points.size());
  const long n2 = static_cast<long>(t2.points.size());
  for (long i = std::max(0L, shift); i < n1 && i - shift < n2; ++i) {
    const auto& p = t1.points[static_cast<std::size_t>(i)];
    const auto& q = t2.points[static_cast<std::size_t>(i - shift)];
    if (footprints_collide(footprint_of(p, t1.length, t1.width),
                           footprint_of(q, t2.length, t2.width))) {
      return p.t;
    }
  }
  return std::nullopt;
}

MergeSequence classify_merge_gap(const Trajectory& vr_traj, const Trajectory& vmc_traj,
                                 const Trajectory& vmr_traj) {
  if (vr_traj.empty()) return MergeSequence::Infeasible;
  const double vr_end = vr_traj.points.back().x;
  const bool hits_vmc = trajectories_collide(vr_traj, vmc_traj).has_value();
  const bool hits_vmr = trajectories_collide(vr_traj, vmr_traj).has_value();

  const bool ahead_of_vmc = vmc_traj.empty() || vr_end > vmc_traj.points.back().x;
  const bool ahead_of_vmr = vmr_traj.empty() || vr_end > vmr_traj.points.back().x;
  if (ahead_of_vmc && !hits_vmc) return MergeSequence::AheadOfVmc;
  if (!ahead_of_vmc && ahead_of_vmr && !hits_vmc && !hits_vmr) {
    return MergeSequence::BetweenVmcAndVmr;
  }
  return MergeSequence::Infeasible;
}

}  // namespace hcomc
