#include "subslam/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace subslam {

namespace {

constexpr double kEps = 1e-12;

std::optional<double> hit_plane(const PlanePrimitive& p, const Vec3& o, const Vec3& d) {
  const double denom = d.dot(p.normal);
  if (std::abs(denom) < kEps) return std::nullopt;
  const double t = (p.point - o).dot(p.normal) / denom;
  if (t <= kEps) return std::nullopt;
  return t;
}

std::optional<double> hit_rect(const RectPrimitive& r, const Vec3& o, const Vec3& d) {
  const double denom = d.dot(r.normal);
  if (std::abs(denom) < kEps) return std::nullopt;
  const double t = (r.center - o).dot(r.normal) / denom;
  if (t <= kEps) return std::nullopt;
  const Vec3 local = o + t * d - r.center;
  const Vec3 u = r.normal.cross(r.up).normalized();
  if (std::abs(local.dot(u)) > r.width / 2) return std::nullopt;
  if (std::abs(local.dot(r.up.normalized())) > r.height / 2) return std::nullopt;
  return t;
}

std::optional<double> hit_box(const BoxPrimitive& b, const Vec3& o, const Vec3& d) {
  double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(d[a]) < kEps) {
      if (o[a] < b.min[a] || o[a] > b.max[a]) return std::nullopt;
      continue;
    }
    double near = (b.min[a] - o[a]) / d[a];
    double far = (b.max[a] - o[a]) / d[a];
    if (near > far) std::swap(near, far);
    t0 = std::max(t0, near);
    t1 = std::min(t1, far);
    if (t0 > t1) return std::nullopt;
  }
  if (t0 > kEps) return t0;  // entering from outside
  if (t1 > kEps) return t1;  // inside: the wall we exit through
  return std::nullopt;
}

std::optional<double> hit_sphere(const SpherePrimitive& s, const Vec3& o, const Vec3& d) {
  const Vec3 oc = o - s.center;
  const double b = oc.dot(d);
  const double c = oc.squaredNorm() - s.radius * s.radius;
  const double disc = b * b - c;
  if (disc < 0) return std::nullopt;
  const double sq = std::sqrt(disc);
  const double t_near = -b - sq;
  if (t_near > kEps) return t_near;
  const double t_far = -b + sq;
  if (t_far > kEps) return t_far;
  return std::nullopt;
}

std::optional<double> hit_triangle(const Vec3& o, const Vec3& d, const Vec3& v0,
                                   const Vec3& v1, const Vec3& v2) {
  // Moeller-Trumbore.
  const Vec3 e1 = v1 - v0;
  const Vec3 e2 = v2 - v0;
  const Vec3 pv = d.cross(e2);
  const double det = e1.dot(pv);
  if (std::abs(det) < kEps) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 tv = o - v0;
  const double u = tv.dot(pv) * inv;
  if (u < -kEps || u > 1 + kEps) return std::nullopt;
  const Vec3 qv = tv.cross(e1);
  const double v = d.dot(qv) * inv;
  if (v < -kEps || u + v > 1 + kEps) return std::nullopt;
  const double t = e2.dot(qv) * inv;
  if (t <= kEps) return std::nullopt;
  return t;
}

Vec3 hf_vertex(const HeightfieldPrimitive& h, int i, int j) {
  return Vec3(i * h.cell, j * h.cell, h.at(i, j));
}

std::optional<double> hit_cell(const HeightfieldPrimitive& h, const Vec3& o,
                               const Vec3& d, int i, int j) {
  const Vec3 v00 = hf_vertex(h, i, j);
  const Vec3 v10 = hf_vertex(h, i + 1, j);
  const Vec3 v01 = hf_vertex(h, i, j + 1);
  const Vec3 v11 = hf_vertex(h, i + 1, j + 1);
  std::optional<double> best;
  if (auto t = hit_triangle(o, d, v00, v10, v11)) best = t;
  if (auto t = hit_triangle(o, d, v00, v11, v01))
    if (!best || *t < *best) best = t;
  return best;
}

std::optional<double> hit_heightfield(const HeightfieldPrimitive& h, const Vec3& o_w,
                                      const Vec3& d_w, double max_range) {
  // Work in the field's local frame and walk cells along the XY shadow of
  // the ray.
  const RigidPose inv_pose = inverse(h.pose);
  const Vec3 o = inv_pose.apply(o_w);
  const Vec3 d = inv_pose.rotation * d_w;

  const double extent_x = (h.nx - 1) * h.cell;
  const double extent_y = (h.ny - 1) * h.cell;

  if (std::abs(d.x()) < kEps && std::abs(d.y()) < kEps) {
    // Vertical ray: single column.
    const int i = static_cast<int>(std::floor(o.x() / h.cell));
    const int j = static_cast<int>(std::floor(o.y() / h.cell));
    if (i < 0 || j < 0 || i >= h.nx - 1 || j >= h.ny - 1) return std::nullopt;
    return hit_cell(h, o, d, i, j);
  }

  // Clip the XY segment of length max_range to the field bounds.
  double t0 = 0.0, t1 = max_range;
  for (int a = 0; a < 2; ++a) {
    const double lo = 0.0, hi = (a == 0 ? extent_x : extent_y);
    if (std::abs(d[a]) < kEps) {
      if (o[a] < lo || o[a] > hi) return std::nullopt;
      continue;
    }
    double near = (lo - o[a]) / d[a];
    double far = (hi - o[a]) / d[a];
    if (near > far) std::swap(near, far);
    t0 = std::max(t0, near);
    t1 = std::min(t1, far);
    if (t0 > t1) return std::nullopt;
  }

  // 2D DDA over grid cells between t0 and t1.
  const double start_x = o.x() + t0 * d.x();
  const double start_y = o.y() + t0 * d.y();
  int i = std::clamp(static_cast<int>(std::floor(start_x / h.cell)), 0, h.nx - 2);
  int j = std::clamp(static_cast<int>(std::floor(start_y / h.cell)), 0, h.ny - 2);
  const int step_i = d.x() > 0 ? 1 : -1;
  const int step_j = d.y() > 0 ? 1 : -1;
  auto boundary_t = [&](int idx, int axis) {
    const double b = idx * h.cell;
    return (b - o[axis]) / d[axis];
  };
  double t_max_x = std::abs(d.x()) < kEps
                       ? std::numeric_limits<double>::infinity()
                       : boundary_t(d.x() > 0 ? i + 1 : i, 0);
  double t_max_y = std::abs(d.y()) < kEps
                       ? std::numeric_limits<double>::infinity()
                       : boundary_t(d.y() > 0 ? j + 1 : j, 1);
  const double t_delta_x =
      std::abs(d.x()) < kEps ? std::numeric_limits<double>::infinity()
                             : h.cell / std::abs(d.x());
  const double t_delta_y =
      std::abs(d.y()) < kEps ? std::numeric_limits<double>::infinity()
                             : h.cell / std::abs(d.y());

  while (true) {
    if (auto t = hit_cell(h, o, d, i, j)) {
      if (*t <= t1 + h.cell) return t;
    }
    if (std::min(t_max_x, t_max_y) > t1) return std::nullopt;
    if (t_max_x < t_max_y) {
      i += step_i;
      t_max_x += t_delta_x;
      if (i < 0 || i >= h.nx - 1) return std::nullopt;
    } else {
      j += step_j;
      t_max_y += t_delta_y;
      if (j < 0 || j >= h.ny - 1) return std::nullopt;
    }
  }
}

void append_mesh(TriangleMesh& mesh, const std::vector<Vec3>& verts,
                 const std::vector<std::array<int, 3>>& tris) {
  const int base = static_cast<int>(mesh.vertices.size());
  mesh.vertices.insert(mesh.vertices.end(), verts.begin(), verts.end());
  for (const auto& t : tris)
    mesh.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
}

void mesh_rect(TriangleMesh& mesh, const RectPrimitive& r) {
  const Vec3 u = r.normal.cross(r.up).normalized() * (r.width / 2);
  const Vec3 v = r.up.normalized() * (r.height / 2);
  append_mesh(mesh,
              {r.center - u - v, r.center + u - v, r.center + u + v, r.center - u + v},
              {{0, 1, 2}, {0, 2, 3}});
}

void mesh_box(TriangleMesh& mesh, const BoxPrimitive& b) {
  std::vector<Vec3> v;
  for (int corner = 0; corner < 8; ++corner)
    v.push_back(Vec3(corner & 1 ? b.max.x() : b.min.x(),
                     corner & 2 ? b.max.y() : b.min.y(),
                     corner & 4 ? b.max.z() : b.min.z()));
  append_mesh(mesh, v,
              {{0, 1, 3}, {0, 3, 2},    // z = min
               {4, 7, 5}, {4, 6, 7},    // z = max
               {0, 5, 1}, {0, 4, 5},    // y = min
               {2, 3, 7}, {2, 7, 6},    // y = max
               {0, 2, 6}, {0, 6, 4},    // x = min
               {1, 5, 7}, {1, 7, 3}});  // x = max
}

void mesh_sphere(TriangleMesh& mesh, const SpherePrimitive& s, int subdivisions) {
  // Icosphere.
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {{-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
                             {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
                             {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<std::array<int, 3>> tris = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int idx = static_cast<int>(verts.size());
      verts.push_back(((verts[a] + verts[b]) / 2).normalized());
      midpoint[key] = idx;
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& t : tris) {
      const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }
  for (auto& v : verts) v = s.center + s.radius * v;
  append_mesh(mesh, verts, tris);
}

void mesh_heightfield(TriangleMesh& mesh, const HeightfieldPrimitive& h) {
  std::vector<Vec3> verts;
  verts.reserve(static_cast<std::size_t>(h.nx) * h.ny);
  for (int j = 0; j < h.ny; ++j)
    for (int i = 0; i < h.nx; ++i) verts.push_back(h.pose.apply(hf_vertex(h, i, j)));
  std::vector<std::array<int, 3>> tris;
  auto vid = [&](int i, int j) { return j * h.nx + i; };
  for (int j = 0; j + 1 < h.ny; ++j)
    for (int i = 0; i + 1 < h.nx; ++i) {
      tris.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      tris.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  append_mesh(mesh, verts, tris);
}

}  // namespace

std::optional<double> raycast(const Scene& scene, const Vec3& origin,
                              const Vec3& dir, double max_range) {
  std::optional<double> best;
  for (const auto& prim : scene.primitives) {
    const std::optional<double> t = std::visit(
        [&](const auto& p) -> std::optional<double> {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, PlanePrimitive>)
            return hit_plane(p, origin, dir);
          else if constexpr (std::is_same_v<T, RectPrimitive>)
            return hit_rect(p, origin, dir);
          else if constexpr (std::is_same_v<T, BoxPrimitive>)
            return hit_box(p, origin, dir);
          else if constexpr (std::is_same_v<T, SpherePrimitive>)
            return hit_sphere(p, origin, dir);
          else
            return hit_heightfield(p, origin, dir, max_range);
        },
        prim);
    if (t && *t <= max_range && (!best || *t < *best)) best = t;
  }
  return best;
}

TriangleMesh scene_mesh(const Scene& scene, int sphere_subdivisions) {
  TriangleMesh mesh;
  for (const auto& prim : scene.primitives) {
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, RectPrimitive>)
            mesh_rect(mesh, p);
          else if constexpr (std::is_same_v<T, BoxPrimitive>)
            mesh_box(mesh, p);
          else if constexpr (std::is_same_v<T, SpherePrimitive>)
            mesh_sphere(mesh, p, sphere_subdivisions);
          else if constexpr (std::is_same_v<T, HeightfieldPrimitive>)
            mesh_heightfield(mesh, p);
          // Infinite planes have no finite triangulation.
        },
        prim);
  }
  return mesh;
}

HeightfieldPrimitive make_bump_heightfield(const RigidPose& pose, double cell,
                                           int nx, int ny, double amplitude,
                                           double base, std::uint64_t seed) {
  HeightfieldPrimitive h;
  h.pose = pose;
  h.cell = cell;
  h.nx = nx;
  h.ny = ny;
  h.z.resize(static_cast<std::size_t>(nx) * ny);

  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> freq(0.25, 1.1);   // rad/m
  std::uniform_real_distribution<double> phase(0, 2 * M_PI);
  std::uniform_real_distribution<double> dir(0, 2 * M_PI);
  struct Wave {
    double fx, fy, ph, amp;
  };
  std::vector<Wave> waves;
  for (int k = 0; k < 6; ++k) {
    const double f = freq(g);
    const double a = dir(g);
    waves.push_back({f * std::cos(a), f * std::sin(a), phase(g), 1.0 / (1 + k)});
  }
  double norm = 0;
  for (const auto& w : waves) norm += w.amp;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double x = i * cell, y = j * cell;
      double v = 0;
      for (const auto& w : waves) v += w.amp * std::sin(w.fx * x + w.fy * y + w.ph);
      h.z[static_cast<std::size_t>(j) * nx + i] = base + amplitude * v / norm;
    }
  return h;
}

}  // namespace subslam
