// Sparse space-carving TSDF: every voxel along an integration ray is
// updated, so observed free space is recorded explicitly at the
// truncation value and later measurements can erode phantom surfaces.

#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "subslam/cloud.hpp"
#include "subslam/voxel.hpp"

namespace subslam {

struct TsdfCell {
  double d = 0.0;  // clamped signed distance [m]
  double w = 0.0;  // accumulated observation weight
};

class TsdfVolume {
 public:
  TsdfVolume() = default;
  TsdfVolume(double voxel_size, double truncation)
      : voxel_size_(voxel_size), truncation_(truncation) {}

  // Builds a volume from raw cells; distances are clamped to the
  // truncation band and zero-weight cells dropped.
  static TsdfVolume from_cells(
      double voxel_size, double truncation,
      const std::vector<std::pair<VoxelKey, TsdfCell>>& cells);

  double voxel_size() const { return voxel_size_; }
  double truncation() const { return truncation_; }
  const std::unordered_map<VoxelKey, TsdfCell, VoxelKeyHash>& cells() const {
    return cells_;
  }
  bool empty() const { return cells_.empty(); }

  // Walks every ray origin->point (extended one truncation band past the
  // point) and fuses clamp(signed distance along ray, +-truncation) into
  // each crossed voxel by weighted running average. Zero-length rays are
  // skipped.
  void integrate_frame(const Vec3& sensor_origin, const PointCloud& cloud,
                       double obs_weight = 1.0);

  // One point per voxel center with |d| < voxel_size/2 and w > 0.
  PointCloud coarse_point_cloud() const;

  void save(const std::string& path) const;
  static TsdfVolume load(const std::string& path);

 private:
  friend class GlobalMapState;
  double voxel_size_ = 0.1;
  double truncation_ = 0.3;
  std::unordered_map<VoxelKey, TsdfCell, VoxelKeyHash> cells_;
};

}  // namespace subslam
