#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "subslam/pose.hpp"

namespace subslam {

// Plain 3D point set. Construction rejects non-finite coordinates; rigid
// transforms of a valid cloud stay valid, so downstream code never
// re-checks.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::vector<Vec3> points);

  void append(const Vec3& p);

  const std::vector<Vec3>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Vec3& operator[](std::size_t i) const { return points_[i]; }

 private:
  std::vector<Vec3> points_;
};

PointCloud transform_cloud(const RigidPose& p, const PointCloud& c);

// One sensor ping: points in the sensor frame plus the odometry pose the
// INS reported for it.
struct SonarFrame {
  PointCloud cloud;
  double timestamp = 0.0;
  RigidPose odom_pose;
  std::int64_t index = 0;
};

}  // namespace subslam
