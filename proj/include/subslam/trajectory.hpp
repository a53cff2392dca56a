#pragma once

#include <string>
#include <utility>
#include <vector>

#include "subslam/pose.hpp"

namespace subslam {

struct TimedPose {
  double t = 0.0;
  RigidPose pose;
};

using Trajectory = std::vector<TimedPose>;

// TUM line format: `timestamp tx ty tz qx qy qz qw`, 9 significant digits.
void write_tum(const std::string& path, const Trajectory& traj);
Trajectory read_tum(const std::string& path);

// Nearest-neighbor timestamp association within `gate` seconds; both
// inputs must be sorted by time. Returns index pairs (into a, into b).
std::vector<std::pair<int, int>> associate(const Trajectory& a, const Trajectory& b,
                                           double gate = 0.05);

}  // namespace subslam
