// Shared generators for the test suites: seeded random poses, clouds and
// synthetic planar scenes.

#pragma once

#include <random>
#include <vector>

#include "subslam/cloud.hpp"
#include "subslam/features.hpp"
#include "subslam/pose.hpp"

namespace subslam::testing {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Vec3 random_unit(std::mt19937_64& g) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v(n(g), n(g), n(g));
  while (v.norm() < 1e-6) v = Vec3(n(g), n(g), n(g));
  return v.normalized();
}

inline RigidPose random_pose(std::mt19937_64& g, double max_trans = 2.0,
                             double max_angle = 2.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> ua(0.0, max_angle);
  RigidPose p;
  p.rotation = so3_exp(random_unit(g) * ua(g));
  p.translation = Vec3(u(g), u(g), u(g)) * max_trans;
  return p;
}

inline Twist random_twist(std::mt19937_64& g, double max_rot = 2.5,
                          double max_trans = 2.0) {
  std::uniform_real_distribution<double> ur(0.0, max_rot);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Twist t;
  t.rotation = random_unit(g) * ur(g);
  t.translation = Vec3(u(g), u(g), u(g)) * max_trans;
  return t;
}

// Points jittered on a rectangular patch: center +- extents along two
// orthogonal in-plane axes, with optional out-of-plane noise.
inline void sample_patch(std::vector<Vec3>& out, std::mt19937_64& g,
                         const Vec3& center, const Vec3& normal, double half_u,
                         double half_v, int count, double noise = 0.0) {
  const Vec3 n = normal.normalized();
  Vec3 any = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 u = n.cross(any).normalized();
  const Vec3 v = n.cross(u).normalized();
  std::uniform_real_distribution<double> du(-half_u, half_u);
  std::uniform_real_distribution<double> dv(-half_v, half_v);
  std::normal_distribution<double> dn(0.0, noise > 0 ? noise : 1e-300);
  for (int i = 0; i < count; ++i) {
    Vec3 p = center + du(g) * u + dv(g) * v;
    if (noise > 0) p += dn(g) * n;
    out.push_back(p);
  }
}

// Three mutually orthogonal patches meeting at a corner: well-conditioned
// geometry for registration in all six degrees of freedom.
inline PointCloud corner_scene(std::mt19937_64& g, double size = 2.0,
                               int per_face = 400, double noise = 0.0) {
  std::vector<Vec3> pts;
  sample_patch(pts, g, {size / 2, size / 2, 0}, Vec3::UnitZ(), size / 2, size / 2,
               per_face, noise);
  sample_patch(pts, g, {size / 2, 0, size / 2}, Vec3::UnitY(), size / 2, size / 2,
               per_face, noise);
  sample_patch(pts, g, {0, size / 2, size / 2}, Vec3::UnitX(), size / 2, size / 2,
               per_face, noise);
  return PointCloud(std::move(pts));
}

}  // namespace subslam::testing
