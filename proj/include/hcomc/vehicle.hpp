#pragma once

#include <string_view>
#include <vector>

namespace hcomc {

enum class Role { VR, VMC, VMF, VMR, VNF, VNR, Background };
enum class VehicleKind { HDV, CAV };
enum class Lane { Ramp, Main1, Main2 };

std::string_view to_string(Role role);
std::string_view to_string(VehicleKind kind);
std::string_view to_string(Lane lane);

// Kinematic and geometric state of one vehicle. x and y locate the footprint
// center; heading is measured from the +x axis.
struct VehicleState {
  int id = 0;
  Role role = Role::Background;
  VehicleKind kind = VehicleKind::CAV;
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
  double accel = 0.0;
  double heading = 0.0;
  double length = 5.0;
  double width = 2.0;
  Lane lane = Lane::Main1;
};

struct TrajectoryPoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
  double accel = 0.0;
  double heading = 0.0;
  double lateral_speed = 0.0;
  double lateral_accel = 0.0;
};

// Time-indexed planned or recorded states of one vehicle on a uniform timebase.
struct Trajectory {
  std::vector<TrajectoryPoint> points;
  double length = 5.0;
  double width = 2.0;
  // Set when the vehicle left the lane-change polynomial's domain before the
  // requested end time; points stop at the last in-domain sample.
  bool truncated = false;

  [[nodiscard]] bool empty() const { return points.empty(); }
  [[nodiscard]] double dt() const {
    return points.size() < 2 ? 0.0 : points[1].t - points[0].t;
  }
};

}  // namespace hcomc
