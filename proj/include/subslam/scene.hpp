// Analytic scenes for the synthetic-data generator: a few primitive
// shapes with exact ray intersections and exact triangulations, so every
// rendered range and every reference mesh has a closed-form ground truth.

#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "subslam/mesh.hpp"
#include "subslam/pose.hpp"

namespace subslam {

// Infinite plane; usable for raycasting but excluded from mesh export.
struct PlanePrimitive {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
};

// Finite rectangle: center, outward normal, in-plane "up" direction.
struct RectPrimitive {
  Vec3 center = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  Vec3 up = Vec3::UnitX();
  double width = 1.0;   // along normal x up
  double height = 1.0;  // along up
};

// Axis-aligned box; rays hit it from outside or from within (tank walls).
struct BoxPrimitive {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Ones();
};

struct SpherePrimitive {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

// Regular grid of heights over the local XY plane, placed by a rigid
// pose; triangulated as two triangles per cell. Rays walk the grid cells
// their XY projection crosses.
struct HeightfieldPrimitive {
  RigidPose pose;          // local -> world
  double cell = 0.5;       // grid spacing [m]
  int nx = 2, ny = 2;      // vertex counts per axis
  std::vector<double> z;   // nx*ny heights, row-major over x

  double at(int i, int j) const { return z[static_cast<std::size_t>(j) * nx + i]; }
};

using Primitive = std::variant<PlanePrimitive, RectPrimitive, BoxPrimitive,
                               SpherePrimitive, HeightfieldPrimitive>;

struct Scene {
  std::vector<Primitive> primitives;
};

// Distance to the first surface along origin + t*dir, if any within
// max_range.
std::optional<double> raycast(const Scene& scene, const Vec3& origin,
                              const Vec3& dir, double max_range);

// Exact triangulation of all finite primitives (spheres are subdivided
// icosahedra; everything else is exact).
TriangleMesh scene_mesh(const Scene& scene, int sphere_subdivisions = 3);

// Smooth deterministic bump field: a seeded sum of sinusoids sampled on
// the grid. amp scales the bump height around the base level.
HeightfieldPrimitive make_bump_heightfield(const RigidPose& pose, double cell,
                                           int nx, int ny, double amplitude,
                                           double base, std::uint64_t seed);

}  // namespace subslam
