#pragma once

#include <array>
#include <optional>

#include "hcomc/vehicle.hpp"

namespace hcomc {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Segment2D {
  Point2 p1;
  Point2 p2;
};

// Oriented rectangle. Corners run counter-clockwise from rear-right.
struct VehicleFootprint {
  Point2 center;
  double heading = 0.0;
  double length = 5.0;
  double width = 2.0;

  [[nodiscard]] std::array<Point2, 4> corners() const;
  [[nodiscard]] std::array<Segment2D, 4> edges() const;
  [[nodiscard]] bool contains(const Point2& p) const;
};

VehicleFootprint footprint_of(const TrajectoryPoint& pt, double length, double width);
VehicleFootprint footprint_of(const VehicleState& state);

// Quick rejection test on the segments' axis-aligned boxes (closed intervals).
// true means the segments may intersect.
bool quick_reject(const Segment2D& a, const Segment2D& b);

// Straddle test by cross products; touching and collinear overlap count as
// intersecting.
bool straddle_intersect(const Segment2D& a, const Segment2D& b);

// Edge-pair enumeration gated by quick_reject, plus a center containment check
// for the nested case.
bool footprints_collide(const VehicleFootprint& f1, const VehicleFootprint& f2);

// Earliest common timestamp at which the footprints overlap. Throws
// std::invalid_argument when the sample spacing or phase differs.
std::optional<double> trajectories_collide(const Trajectory& t1, const Trajectory& t2);

enum class MergeSequence { AheadOfVmc, BetweenVmcAndVmr, Infeasible };

// Merging sequence implied by the final longitudinal order, accepted only when
// VR never touches the neighbours that bound the chosen slot.
MergeSequence classify_merge_gap(const Trajectory& vr_traj, const Trajectory& vmc_traj,
                                 const Trajectory& vmr_traj);

}  // namespace hcomc
