#include "subslam/features.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace subslam {

OrientedCloud extract_oriented_surface_points(const PointCloud& c, double r,
                                              const Vec3& view_origin) {
  if (r <= 0) throw std::invalid_argument("extract_oriented_surface_points: r must be > 0");
  OrientedCloud out;
  out.resolution = r;
  if (c.empty()) return out;

  std::unordered_map<VoxelKey, std::vector<int>, VoxelKeyHash> grid;
  grid.reserve(c.size() / 2);
  std::vector<VoxelKey> occupied_order;  // first-touch order, for determinism
  for (int i = 0; i < static_cast<int>(c.size()); ++i) {
    VoxelKey k = voxel_key_of(c[i], r);
    auto [it, inserted] = grid.try_emplace(k);
    if (inserted) occupied_order.push_back(k);
    it->second.push_back(i);
  }

  const double r2 = r * r;
  out.surface_points.reserve(occupied_order.size());
  for (const VoxelKey& key : occupied_order) {
    const Vec3 centroid = voxel_center(key, r);

    // Gather within radius r of the centroid; the ball cannot reach past
    // the adjacent voxels.
    Vec3 sum = Vec3::Zero();
    int n = 0;
    std::vector<const Vec3*> gathered;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = grid.find({key.x + dx, key.y + dy, key.z + dz});
          if (it == grid.end()) continue;
          for (int idx : it->second) {
            const Vec3& p = c[idx];
            if ((p - centroid).squaredNorm() <= r2) {
              sum += p;
              ++n;
              gathered.push_back(&p);
            }
          }
        }
    if (n <= 6) continue;

    const Vec3 mean = sum / n;
    Mat3 cov = Mat3::Zero();
    for (const Vec3* p : gathered) {
      const Vec3 d = *p - mean;
      cov += d * d.transpose();
    }
    cov /= (n - 1);

    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    const Vec3 evals = eig.eigenvalues();  // ascending
    if (evals[2] < 1e-15) continue;        // all points coincident
    if (evals[0] < 1e-12 * evals[2] && evals[1] < 1e-12 * evals[2])
      continue;  // collinear support, normal undefined

    Vec3 normal = eig.eigenvectors().col(0).normalized();
    if (normal.dot(view_origin - mean) < 0) normal = -normal;
    out.surface_points.push_back({mean, normal, n});
  }
  return out;
}

OrientedCloud transform_features(const RigidPose& p, const OrientedCloud& oc) {
  OrientedCloud out;
  out.resolution = oc.resolution;
  out.surface_points.reserve(oc.size());
  for (const auto& sp : oc.surface_points)
    out.surface_points.push_back({p.apply(sp.mean), p.rotation * sp.normal, sp.support_count});
  return out;
}

double occupancy_overlap(const PointCloud& a, const PointCloud& b, double r) {
  if (r <= 0) throw std::invalid_argument("occupancy_overlap: r must be > 0");
  if (a.empty()) throw std::invalid_argument("occupancy_overlap: empty query cloud");

  std::unordered_set<VoxelKey, VoxelKeyHash> occ_a;
  occ_a.reserve(a.size());
  for (const auto& p : a.points()) occ_a.insert(voxel_key_of(p, r));

  std::unordered_set<VoxelKey, VoxelKeyHash> occ_b;
  occ_b.reserve(b.size());
  for (const auto& p : b.points()) occ_b.insert(voxel_key_of(p, r));

  std::size_t hit = 0;
  for (const auto& k : occ_a)
    if (occ_b.count(k)) ++hit;
  return static_cast<double>(hit) / static_cast<double>(occ_a.size());
}

}  // namespace subslam
