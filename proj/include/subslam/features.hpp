// Sparse oriented-surface-point scan representation: one (mean, normal)
// pair per voxel with enough local support, the normal taken from the
// smallest-eigenvalue direction of the local covariance.

#pragma once

#include <vector>

#include "subslam/cloud.hpp"
#include "subslam/voxel.hpp"

namespace subslam {

struct OrientedSurfacePoint {
  Vec3 mean = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  int support_count = 0;
};

struct OrientedCloud {
  std::vector<OrientedSurfacePoint> surface_points;
  double resolution = 0.0;

  std::size_t size() const { return surface_points.size(); }
  bool empty() const { return surface_points.empty(); }
};

// Builds the oriented surface points of a cloud at grid resolution r.
// For every occupied voxel, the points within radius r of the voxel
// centroid are gathered (the sphere spans the 3x3x3 neighborhood); voxels
// with more than 6 supporting points and a well-defined smallest
// eigenvector yield one surface point. Normals are oriented toward
// `view_origin` so repeated runs give identical signs.
OrientedCloud extract_oriented_surface_points(const PointCloud& c, double r,
                                              const Vec3& view_origin = Vec3::Zero());

// Rigidly transforms a feature cloud (means fully, normals by rotation).
OrientedCloud transform_features(const RigidPose& p, const OrientedCloud& oc);

// |occupied(a) ∩ occupied(b)| / |occupied(a)| on the voxel grid at
// resolution r; `a` is the query cloud. Throws on an empty query.
double occupancy_overlap(const PointCloud& a, const PointCloud& b, double r);

}  // namespace subslam
