#include "subslam/mesh.hpp"

#include <algorithm>
#include <unordered_map>

#include "mc_tables.hpp"

namespace subslam {

namespace {

struct EdgeKey {
  VoxelKey cell;
  int axis = 0;
  bool operator==(const EdgeKey&) const = default;
};

struct EdgeKeyHash {
  std::size_t operator()(const EdgeKey& e) const {
    return VoxelKeyHash{}(e.cell) * 31u + static_cast<std::size_t>(e.axis);
  }
};

}  // namespace

TriangleMesh extract_mesh(const TsdfVolume& v) {
  TriangleMesh mesh;
  const auto& cells = v.cells();
  const double vs = v.voxel_size();

  // Deterministic cube order regardless of hash layout.
  std::vector<VoxelKey> anchors;
  anchors.reserve(cells.size());
  for (const auto& [k, c] : cells)
    if (c.w > 0) anchors.push_back(k);
  std::sort(anchors.begin(), anchors.end());

  std::unordered_map<EdgeKey, int, EdgeKeyHash> edge_vertex;
  edge_vertex.reserve(anchors.size());

  for (const VoxelKey& a : anchors) {
    double d[8];
    int cube_index = 0;
    bool complete = true;
    for (int i = 0; i < 8; ++i) {
      const VoxelKey k{a.x + mc::kCornerShift[i][0], a.y + mc::kCornerShift[i][1],
                       a.z + mc::kCornerShift[i][2]};
      auto it = cells.find(k);
      if (it == cells.end() || it->second.w <= 0) {
        complete = false;
        break;
      }
      d[i] = it->second.d;
      if (d[i] < 0) cube_index |= (1 << i);
    }
    if (!complete || cube_index == 0 || cube_index == 255) continue;

    int edge_to_index[12];
    for (int e = 0; e < 12; ++e) {
      if (!(mc::kEdgeTable[cube_index] & (1 << e))) continue;
      const EdgeKey key{{a.x + mc::kEdgeShift[e][0], a.y + mc::kEdgeShift[e][1],
                         a.z + mc::kEdgeShift[e][2]},
                        mc::kEdgeShift[e][3]};
      auto it = edge_vertex.find(key);
      if (it != edge_vertex.end()) {
        edge_to_index[e] = it->second;
        continue;
      }
      const double d0 = d[mc::kEdgeToCorner[e][0]];
      const double d1 = d[mc::kEdgeToCorner[e][1]];
      const double t = d0 / (d0 - d1);  // opposite signs, so 0 <= t <= 1
      Vec3 p = voxel_center(key.cell, vs);
      p[key.axis] += t * vs;
      edge_to_index[e] = static_cast<int>(mesh.vertices.size());
      edge_vertex.emplace(key, edge_to_index[e]);
      mesh.vertices.push_back(p);
    }

    // Reversed winding so triangles face the positive-distance side.
    for (int i = 0; mc::kTriTable[cube_index][i] != -1; i += 3) {
      mesh.triangles.push_back({edge_to_index[mc::kTriTable[cube_index][i]],
                                edge_to_index[mc::kTriTable[cube_index][i + 2]],
                                edge_to_index[mc::kTriTable[cube_index][i + 1]]});
    }
  }
  return mesh;
}

}  // namespace subslam
