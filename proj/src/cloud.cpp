#include "subslam/cloud.hpp"

#include <stdexcept>

namespace subslam {

PointCloud::PointCloud(std::vector<Vec3> points) : points_(std::move(points)) {
  for (const auto& p : points_) {
    if (!p.allFinite())
      throw std::invalid_argument("PointCloud: non-finite coordinate");
  }
}

void PointCloud::append(const Vec3& p) {
  if (!p.allFinite())
    throw std::invalid_argument("PointCloud: non-finite coordinate");
  points_.push_back(p);
}

PointCloud transform_cloud(const RigidPose& p, const PointCloud& c) {
  std::vector<Vec3> out;
  out.reserve(c.size());
  for (const auto& x : c.points()) out.push_back(p.apply(x));
  return PointCloud(std::move(out));
}

}  // namespace subslam
