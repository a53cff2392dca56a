// Integer voxel indices shared by the feature grid, the TSDF volumes and
// the overlap tests: key = floor(coordinate / resolution) per axis.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

#include "subslam/pose.hpp"

namespace subslam {

struct VoxelKey {
  std::int32_t x = 0, y = 0, z = 0;

  bool operator==(const VoxelKey&) const = default;
  bool operator<(const VoxelKey& o) const {
    if (x != o.x) return x < o.x;
    if (y != o.y) return y < o.y;
    return z < o.z;
  }
};

inline VoxelKey voxel_key_of(const Vec3& p, double resolution) {
  return {static_cast<std::int32_t>(std::floor(p.x() / resolution)),
          static_cast<std::int32_t>(std::floor(p.y() / resolution)),
          static_cast<std::int32_t>(std::floor(p.z() / resolution))};
}

inline Vec3 voxel_center(const VoxelKey& k, double resolution) {
  return {(k.x + 0.5) * resolution, (k.y + 0.5) * resolution,
          (k.z + 0.5) * resolution};
}

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    // FNV-style mix of the packed indices; good spread for dense grids.
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint64_t v :
         {static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.x)),
          static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.y)),
          static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.z))}) {
      h ^= v;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace subslam
