#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "helpers.hpp"
#include "subslam/mesh.hpp"
#include "subslam/tsdf.hpp"

using namespace subslam;
namespace tst = subslam::testing;

TEST_CASE("single ray geometry") {
  TsdfVolume v(0.1, 0.3);
  PointCloud c;
  c.append(Vec3(2.0, 0.0, 0.0));
  v.integrate_frame(Vec3::Zero(), c);

  // Voxel holding the endpoint: center 2.05, signed distance -0.05.
  const auto& cells = v.cells();
  auto hit = cells.find(voxel_key_of(Vec3(2.0, 0.0, 0.0), 0.1));
  REQUIRE(hit != cells.end());
  CHECK(std::abs(hit->second.d) < 0.1);
  CHECK(hit->second.d == doctest::Approx(-0.05).epsilon(1e-9));

  // Free space along the ray is carved at +truncation.
  auto free_cell = cells.find(voxel_key_of(Vec3(1.0, 0.0, 0.0), 0.1));
  REQUIRE(free_cell != cells.end());
  CHECK(free_cell->second.d == doctest::Approx(0.3));

  // Behind the surface within the truncation band: center 2.25 -> -0.25.
  auto behind = cells.find(voxel_key_of(Vec3(2.2, 0.0, 0.0), 0.1));
  REQUIRE(behind != cells.end());
  CHECK(behind->second.d == doctest::Approx(-0.25).epsilon(1e-9));

  // Nothing past the truncation band.
  CHECK(cells.find(voxel_key_of(Vec3(2.4, 0.0, 0.0), 0.1)) == cells.end());
}

TEST_CASE("re-integrating the same frame doubles weights, keeps distances") {
  auto g = tst::rng(51);
  PointCloud c = tst::corner_scene(g, 2.0, 200);
  TsdfVolume v(0.1, 0.3);
  const Vec3 origin(1, 1, 3);
  v.integrate_frame(origin, c);
  const auto snapshot = v.cells();
  v.integrate_frame(origin, c);
  REQUIRE(v.cells().size() == snapshot.size());
  for (const auto& [key, cell] : v.cells()) {
    const auto& before = snapshot.at(key);
    CHECK(cell.w == doctest::Approx(2.0 * before.w));
    CHECK(cell.d == doctest::Approx(before.d).epsilon(1e-12));
  }
}

TEST_CASE("plane observed from many poses puts the zero crossing on the plane") {
  // Plane z = 0 observed from z = 2 with rays straight down on a jittered
  // grid of sample points.
  auto g = tst::rng(52);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TsdfVolume v(0.1, 0.3);
  for (int pose = 0; pose < 50; ++pose) {
    const Vec3 origin(u(g), u(g), 2.0);
    std::vector<Vec3> pts;
    for (int i = 0; i < 100; ++i) pts.push_back(Vec3(u(g) * 2, u(g) * 2, 0.0));
    v.integrate_frame(origin, PointCloud(pts));
  }
  // Check the zero crossing along vertical voxel columns near the center.
  int columns = 0, good = 0;
  for (int ix = -5; ix <= 5; ++ix)
    for (int iy = -5; iy <= 5; ++iy) {
      // d should change sign between the voxel above and below z=0.
      auto above = v.cells().find({ix, iy, 0});   // centers at +0.05
      auto below = v.cells().find({ix, iy, -1});  // centers at -0.05
      if (above == v.cells().end() || below == v.cells().end()) continue;
      ++columns;
      if (above->second.d > 0 && below->second.d < 0) ++good;
    }
  REQUIRE(columns > 50);
  CHECK(static_cast<double>(good) / columns >= 0.99);
}

TEST_CASE("integration is permutation invariant within a frame") {
  auto g = tst::rng(53);
  std::vector<Vec3> pts;
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 300; ++i) pts.push_back(Vec3(u(g), u(g), 1.0 + 0.2 * u(g)));
  std::vector<Vec3> shuffled = pts;
  std::shuffle(shuffled.begin(), shuffled.end(), g);

  TsdfVolume a(0.1, 0.3), b(0.1, 0.3);
  a.integrate_frame(Vec3(0, 0, 3), PointCloud(pts));
  b.integrate_frame(Vec3(0, 0, 3), PointCloud(shuffled));
  REQUIRE(a.cells().size() == b.cells().size());
  for (const auto& [key, cell] : a.cells()) {
    const auto& other = b.cells().at(key);
    CHECK(std::abs(cell.d - other.d) < 1e-9);
    CHECK(std::abs(cell.w - other.w) < 1e-9);
  }
}

TEST_CASE("truncation clamp holds everywhere") {
  auto g = tst::rng(54);
  TsdfVolume v(0.1, 0.3);
  for (int f = 0; f < 5; ++f)
    v.integrate_frame(Vec3(0, 0, 2.0 + f * 0.1), tst::corner_scene(g, 2.0, 300));
  for (const auto& [key, cell] : v.cells()) {
    CHECK(std::abs(cell.d) <= 0.3 + 1e-12);
    CHECK(cell.w >= 0);
  }
}

TEST_CASE("coarse point cloud emits exactly the near-surface voxels") {
  TsdfVolume v(0.1, 0.3);
  CHECK(v.coarse_point_cloud().empty());

  PointCloud c;
  c.append(Vec3(2.0, 0.0, 0.0));
  v.integrate_frame(Vec3::Zero(), c);
  const PointCloud coarse = v.coarse_point_cloud();

  // Brute-force filter over all cells.
  std::size_t expected = 0;
  for (const auto& [key, cell] : v.cells())
    if (cell.w > 0 && std::abs(cell.d) < 0.05) ++expected;
  CHECK(coarse.size() == expected);
  for (const auto& p : coarse.points()) {
    const auto& cell = v.cells().at(voxel_key_of(p, 0.1));
    CHECK(std::abs(cell.d) < 0.05);
  }
}

TEST_CASE("sphere scene coarse cloud lies near the sphere") {
  // Rays from the center outward hit a sphere of radius 1.5.
  TsdfVolume v(0.1, 0.3);
  std::vector<Vec3> pts;
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 20; ++j) {
      const double az = 2 * M_PI * i / 40.0;
      const double el = M_PI * (j + 0.5) / 20.0 - M_PI / 2;
      pts.push_back(1.5 * Vec3(std::cos(el) * std::cos(az),
                               std::cos(el) * std::sin(az), std::sin(el)));
    }
  v.integrate_frame(Vec3::Zero(), PointCloud(pts));
  const PointCloud coarse = v.coarse_point_cloud();
  REQUIRE(!coarse.empty());
  for (const auto& p : coarse.points())
    CHECK(std::abs(p.norm() - 1.5) < 0.1 + 1e-9);
}

TEST_CASE("volume save/load round trip") {
  auto g = tst::rng(55);
  TsdfVolume v(0.1, 0.3);
  v.integrate_frame(Vec3(0, 0, 2), tst::corner_scene(g, 1.5, 150));
  v.save("/tmp/subslam_test_volume.tsdf");
  const TsdfVolume r = TsdfVolume::load("/tmp/subslam_test_volume.tsdf");
  CHECK(r.voxel_size() == v.voxel_size());
  CHECK(r.truncation() == v.truncation());
  REQUIRE(r.cells().size() == v.cells().size());
  for (const auto& [key, cell] : v.cells()) {
    CHECK(r.cells().at(key).d == cell.d);
    CHECK(r.cells().at(key).w == cell.w);
  }
}

// ---- marching cubes -------------------------------------------------------

namespace {

// Samples an analytic signed distance field into a volume over a box.
template <typename F>
TsdfVolume sampled_volume(double voxel, double trunc, const Vec3& lo,
                          const Vec3& hi, F&& sdf) {
  std::vector<std::pair<VoxelKey, TsdfCell>> cells;
  const VoxelKey kmin = voxel_key_of(lo, voxel);
  const VoxelKey kmax = voxel_key_of(hi, voxel);
  for (std::int32_t x = kmin.x; x <= kmax.x; ++x)
    for (std::int32_t y = kmin.y; y <= kmax.y; ++y)
      for (std::int32_t z = kmin.z; z <= kmax.z; ++z) {
        const VoxelKey k{x, y, z};
        cells.push_back({k, {sdf(voxel_center(k, voxel)), 1.0}});
      }
  return TsdfVolume::from_cells(voxel, trunc, cells);
}

}  // namespace

TEST_CASE("uniform positive field has no mesh") {
  const TsdfVolume v = sampled_volume(0.1, 0.3, Vec3(-1, -1, -1), Vec3(1, 1, 1),
                                      [](const Vec3&) { return 0.3; });
  CHECK(extract_mesh(v).empty());
}

TEST_CASE("sphere mesh vertices sit on the sphere") {
  const double R = 0.8;
  const TsdfVolume v =
      sampled_volume(0.1, 0.3, Vec3(-1.2, -1.2, -1.2), Vec3(1.2, 1.2, 1.2),
                     [&](const Vec3& p) { return p.norm() - R; });
  const TriangleMesh mesh = extract_mesh(v);
  REQUIRE(mesh.vertices.size() > 100);
  REQUIRE(!mesh.triangles.empty());
  for (const auto& vtx : mesh.vertices) CHECK(std::abs(vtx.norm() - R) < 0.05);
  for (const auto& t : mesh.triangles)
    for (int k : t) {
      CHECK(k >= 0);
      CHECK(k < static_cast<int>(mesh.vertices.size()));
    }
}

TEST_CASE("plane mesh has the plane normal, facing positive distance") {
  // d(p) = p.z: surface z = 0, positive side above.
  const TsdfVolume v = sampled_volume(0.1, 0.3, Vec3(-1, -1, -0.5), Vec3(1, 1, 0.5),
                                      [](const Vec3& p) { return p.z(); });
  const TriangleMesh mesh = extract_mesh(v);
  REQUIRE(!mesh.triangles.empty());
  for (const auto& t : mesh.triangles) {
    const Vec3 n = (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                       .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]])
                       .normalized();
    const double angle = std::acos(std::clamp(n.dot(Vec3::UnitZ()), -1.0, 1.0));
    CHECK(angle < 2.0 * M_PI / 180.0);
  }
  for (const auto& vtx : mesh.vertices) CHECK(std::abs(vtx.z()) < 1e-9);
}
