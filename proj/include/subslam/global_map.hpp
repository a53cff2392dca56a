// Incrementally correctable global TSDF built from rigid submap volumes.
// Submap fields live in their own anchor frames; the global field keeps a
// weighted numerator and weight per voxel so a submap can be removed at
// the pose it was integrated with and re-added at a corrected one without
// touching any other contribution.

#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>

#include "subslam/mesh.hpp"
#include "subslam/tsdf.hpp"

namespace subslam {

struct ReprocessConfig {
  double trans_thresh = 0.01;              // meters
  double rot_thresh = 0.1 * M_PI / 180.0;  // radians
};

// True iff the pose change exceeds either threshold (strict inequality).
bool reprocess_decision(const RigidPose& old_pose, const RigidPose& new_pose,
                        const ReprocessConfig& cfg = {});

// Per-voxel weighted signed distance and weight of one submap sampled
// onto the global grid.
struct PsiW {
  double psi = 0.0;  // w * d
  double w = 0.0;
};

using ContributionField = std::unordered_map<VoxelKey, PsiW, VoxelKeyHash>;

class GlobalMapState {
 public:
  GlobalMapState(double voxel_size, double truncation)
      : voxel_size_(voxel_size), truncation_(truncation) {}

  // Stores a closed submap volume with its odometry-frame anchor pose; it
  // becomes part of the global field on the next global_update call that
  // names it.
  void add_submap(int id, TsdfVolume volume, const RigidPose& odom_pose);
  bool has_submap(int id) const { return submaps_.count(id) > 0; }

  // Appends the submap pose produced by graph optimization n.
  void record_pose(int id, int n, const RigidPose& world_pose);
  const RigidPose& pose_at(int id, int n) const;

  // Samples submap k onto global voxel centers using its pose at
  // optimization index q: each center x is pulled back into the submap
  // frame and the stored field is interpolated there (trilinearly, or
  // nearest-cell when configured). Throws if the pose index is missing.
  ContributionField submap_contribution(int k, int q) const;

  // Applies the incremental update for optimization n: integrates the new
  // submap (if any) at its pose at n, and for every moved submap removes
  // the contribution at its previous integration index and re-adds it at
  // n. Voxels whose weight returns to zero are dropped.
  void global_update(std::optional<int> new_submap, const std::set<int>& moved,
                     int n);

  // Moved set for optimization n per the reprocess thresholds.
  std::set<int> compute_moved(int n, const ReprocessConfig& cfg) const;

  const std::map<int, int>& integrated_pose_index() const { return phi_; }
  const std::map<int, TsdfVolume>& submap_volumes() const { return volumes_; }

  // Materializes the global field as a TSDF volume (d = numerator/weight).
  TsdfVolume global_volume() const;

  void set_nearest_interpolation(bool on) { nearest_ = on; }
  double voxel_size() const { return voxel_size_; }
  double truncation() const { return truncation_; }

 private:
  struct Accum {
    double num = 0.0;  // sum of w*d
    double w = 0.0;
  };

  PsiW sample(const TsdfVolume& v, const Vec3& p) const;

  double voxel_size_;
  double truncation_;
  bool nearest_ = false;
  std::map<int, TsdfVolume> volumes_;
  std::map<int, RigidPose> odom_poses_;
  std::map<int, std::map<int, RigidPose>> pose_history_;
  std::map<int, int> phi_;
  std::set<int> submaps_;
  std::unordered_map<VoxelKey, Accum, VoxelKeyHash> field_;
};

}  // namespace subslam
