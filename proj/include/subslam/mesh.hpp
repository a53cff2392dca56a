#pragma once

#include <array>
#include <vector>

#include "subslam/tsdf.hpp"

namespace subslam {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;

  bool empty() const { return triangles.empty(); }
};

// Marching cubes over the sparse field at the zero level set. Cube corners
// sit on voxel centers; cubes with any of the 8 cells missing (or
// unobserved, w = 0) are skipped. Edge vertices are interpolated linearly
// from the signed distances and welded across neighboring cubes.
TriangleMesh extract_mesh(const TsdfVolume& v);

}  // namespace subslam
