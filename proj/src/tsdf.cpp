#include "subslam/tsdf.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace subslam {

TsdfVolume TsdfVolume::from_cells(
    double voxel_size, double truncation,
    const std::vector<std::pair<VoxelKey, TsdfCell>>& cells) {
  TsdfVolume v(voxel_size, truncation);
  for (const auto& [key, cell] : cells) {
    if (cell.w <= 0) continue;
    v.cells_[key] = {std::clamp(cell.d, -truncation, truncation), cell.w};
  }
  return v;
}

void TsdfVolume::integrate_frame(const Vec3& sensor_origin, const PointCloud& cloud,
                                 double obs_weight) {
  if (!sensor_origin.allFinite())
    throw std::invalid_argument("integrate_frame: non-finite sensor origin");

  for (const auto& p : cloud.points()) {
    const Vec3 ray = p - sensor_origin;
    const double range = ray.norm();
    if (range < 1e-12) continue;  // zero-length ray
    const Vec3 dir = ray / range;
    const double t_end = range + truncation_;

    // Amanatides-Woo traversal from the origin voxel to the extended end.
    VoxelKey v = voxel_key_of(sensor_origin, voxel_size_);
    const VoxelKey v_end = voxel_key_of(sensor_origin + t_end * dir, voxel_size_);
    int step[3];
    double t_max[3], t_delta[3];
    const double origin_arr[3] = {sensor_origin.x(), sensor_origin.y(),
                                  sensor_origin.z()};
    const std::int32_t v_arr[3] = {v.x, v.y, v.z};
    for (int a = 0; a < 3; ++a) {
      const double d = dir[a];
      if (d > 0) {
        step[a] = 1;
        const double boundary = (v_arr[a] + 1) * voxel_size_;
        t_max[a] = (boundary - origin_arr[a]) / d;
        t_delta[a] = voxel_size_ / d;
      } else if (d < 0) {
        step[a] = -1;
        const double boundary = v_arr[a] * voxel_size_;
        t_max[a] = (boundary - origin_arr[a]) / d;
        t_delta[a] = -voxel_size_ / d;
      } else {
        step[a] = 0;
        t_max[a] = std::numeric_limits<double>::infinity();
        t_delta[a] = std::numeric_limits<double>::infinity();
      }
    }

    // Bounded by the axis-aligned path length between the end voxels.
    const int max_steps = std::abs(v_end.x - v.x) + std::abs(v_end.y - v.y) +
                          std::abs(v_end.z - v.z) + 3;
    for (int s = 0; s < max_steps; ++s) {
      const Vec3 center = voxel_center(v, voxel_size_);
      const double along = (center - sensor_origin).dot(dir);
      const double sdf = std::clamp(range - along, -truncation_, truncation_);
      TsdfCell& cell = cells_[v];
      const double w_new = cell.w + obs_weight;
      cell.d = std::clamp((cell.w * cell.d + obs_weight * sdf) / w_new,
                          -truncation_, truncation_);
      cell.w = w_new;

      if (v == v_end) break;
      int axis = 0;
      if (t_max[1] < t_max[axis]) axis = 1;
      if (t_max[2] < t_max[axis]) axis = 2;
      if (t_max[axis] > t_end) break;
      if (axis == 0) v.x += step[0];
      else if (axis == 1) v.y += step[1];
      else v.z += step[2];
      t_max[axis] += t_delta[axis];
    }
  }
}

PointCloud TsdfVolume::coarse_point_cloud() const {
  PointCloud out;
  const double half = 0.5 * voxel_size_;
  for (const auto& [key, cell] : cells_) {
    if (cell.w > 0 && std::abs(cell.d) < half)
      out.append(voxel_center(key, voxel_size_));
  }
  return out;
}

void TsdfVolume::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("TsdfVolume::save: cannot open " + path);
  const char magic[8] = {'T', 'S', 'D', 'F', '0', '0', '0', '1'};
  f.write(magic, 8);
  const std::uint64_t n = cells_.size();
  f.write(reinterpret_cast<const char*>(&voxel_size_), sizeof(double));
  f.write(reinterpret_cast<const char*>(&truncation_), sizeof(double));
  f.write(reinterpret_cast<const char*>(&n), sizeof(n));
  // Sorted for reproducible bytes.
  std::vector<VoxelKey> keys;
  keys.reserve(cells_.size());
  for (const auto& [k, c] : cells_) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  for (const auto& k : keys) {
    const TsdfCell& c = cells_.at(k);
    f.write(reinterpret_cast<const char*>(&k.x), sizeof(std::int32_t));
    f.write(reinterpret_cast<const char*>(&k.y), sizeof(std::int32_t));
    f.write(reinterpret_cast<const char*>(&k.z), sizeof(std::int32_t));
    f.write(reinterpret_cast<const char*>(&c.d), sizeof(double));
    f.write(reinterpret_cast<const char*>(&c.w), sizeof(double));
  }
  if (!f) throw std::runtime_error("TsdfVolume::save: write failed for " + path);
}

TsdfVolume TsdfVolume::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("TsdfVolume::load: cannot open " + path);
  char magic[8];
  f.read(magic, 8);
  if (!f || std::string(magic, 8) != "TSDF0001")
    throw std::runtime_error("TsdfVolume::load: bad magic in " + path);
  TsdfVolume v;
  std::uint64_t n = 0;
  f.read(reinterpret_cast<char*>(&v.voxel_size_), sizeof(double));
  f.read(reinterpret_cast<char*>(&v.truncation_), sizeof(double));
  f.read(reinterpret_cast<char*>(&n), sizeof(n));
  for (std::uint64_t i = 0; i < n; ++i) {
    VoxelKey k;
    TsdfCell c;
    f.read(reinterpret_cast<char*>(&k.x), sizeof(std::int32_t));
    f.read(reinterpret_cast<char*>(&k.y), sizeof(std::int32_t));
    f.read(reinterpret_cast<char*>(&k.z), sizeof(std::int32_t));
    f.read(reinterpret_cast<char*>(&c.d), sizeof(double));
    f.read(reinterpret_cast<char*>(&c.w), sizeof(double));
    if (!f) throw std::runtime_error("TsdfVolume::load: truncated file " + path);
    v.cells_[k] = c;
  }
  return v;
}

}  // namespace subslam
