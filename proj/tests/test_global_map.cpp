#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "subslam/global_map.hpp"

using namespace subslam;
namespace tst = subslam::testing;

namespace {

constexpr double kVoxel = 0.1;
constexpr double kTrunc = 0.3;

TsdfVolume random_submap_volume(std::mt19937_64& g, int points = 250) {
  TsdfVolume v(kVoxel, kTrunc);
  const PointCloud scene = tst::corner_scene(g, 1.5, points);
  v.integrate_frame(Vec3(0.75, 0.75, 2.0), scene);
  return v;
}

// Sums submap contributions into fresh numerator/weight maps: the
// from-scratch rebuild at the integrated pose indices.
struct RebuiltField {
  std::unordered_map<VoxelKey, double, VoxelKeyHash> num, w;
};

RebuiltField rebuild(const GlobalMapState& gm) {
  RebuiltField out;
  for (const auto& [id, phi] : gm.integrated_pose_index()) {
    const ContributionField c = gm.submap_contribution(id, phi);
    for (const auto& [key, pw] : c) {
      out.num[key] += pw.psi;
      out.w[key] += pw.w;
    }
  }
  for (auto it = out.w.begin(); it != out.w.end();) {
    if (it->second <= 1e-12) {
      out.num.erase(it->first);
      it = out.w.erase(it);
    } else {
      ++it;
    }
  }
  return out;
}

void check_equals_rebuild(const GlobalMapState& gm, double tol) {
  const RebuiltField ref = rebuild(gm);
  const TsdfVolume vol = gm.global_volume();
  REQUIRE(vol.cells().size() == ref.w.size());
  for (const auto& [key, cell] : vol.cells()) {
    const double d_ref = std::clamp(ref.num.at(key) / ref.w.at(key), -kTrunc, kTrunc);
    CHECK(std::abs(cell.d - d_ref) < tol);
    CHECK(std::abs(cell.w - ref.w.at(key)) < tol);
  }
}

}  // namespace

TEST_CASE("reprocess decision thresholds") {
  ReprocessConfig cfg;  // 1 cm, 0.1 deg
  RigidPose a;
  CHECK_FALSE(reprocess_decision(a, a, cfg));

  RigidPose shifted = a;
  shifted.translation = Vec3(0.02, 0, 0);
  CHECK(reprocess_decision(a, shifted, cfg));

  // Exactly at the rotation threshold: strict inequality says no.
  RigidPose turned = a;
  turned.rotation = so3_exp(Vec3(0, 0, cfg.rot_thresh));
  const double angle = rotation_angle(a.rotation, turned.rotation);
  CHECK(angle == doctest::Approx(cfg.rot_thresh).epsilon(1e-9));
  CHECK_FALSE(reprocess_decision(a, turned, cfg));
  turned.rotation = so3_exp(Vec3(0, 0, 2 * cfg.rot_thresh));
  CHECK(reprocess_decision(a, turned, cfg));
}

TEST_CASE("identity-pose contribution equals the submap field resampled") {
  auto g = tst::rng(61);
  GlobalMapState gm(kVoxel, kTrunc);
  const TsdfVolume vol = random_submap_volume(g);
  const RigidPose anchor = tst::random_pose(g, 1.0, 1.0);
  gm.add_submap(0, vol, anchor);
  // World pose equal to the odometry pose: theta is the identity.
  gm.record_pose(0, 0, anchor);
  const ContributionField c = gm.submap_contribution(0, 0);
  REQUIRE(c.size() == vol.cells().size());
  for (const auto& [key, cell] : vol.cells()) {
    const auto it = c.find(key);
    REQUIRE(it != c.end());
    CHECK(it->second.w == doctest::Approx(cell.w).epsilon(1e-12));
    CHECK(it->second.psi == doctest::Approx(cell.w * cell.d).epsilon(1e-12));
  }
}

TEST_CASE("one-voxel lattice shift moves the field exactly") {
  auto g = tst::rng(62);
  GlobalMapState gm(kVoxel, kTrunc);
  const TsdfVolume vol = random_submap_volume(g);
  gm.add_submap(3, vol, RigidPose::identity());
  RigidPose shifted;
  shifted.translation = Vec3(kVoxel, 0, 0);  // submap placed one voxel along +x
  gm.record_pose(3, 0, shifted);
  const ContributionField c = gm.submap_contribution(3, 0);
  REQUIRE(c.size() == vol.cells().size());
  for (const auto& [key, cell] : vol.cells()) {
    const VoxelKey moved{key.x + 1, key.y, key.z};
    const auto it = c.find(moved);
    REQUIRE(it != c.end());
    CHECK(it->second.w == doctest::Approx(cell.w).epsilon(1e-12));
    CHECK(it->second.psi == doctest::Approx(cell.w * cell.d).epsilon(1e-12));
  }
}

TEST_CASE("contribution matches a direct per-voxel evaluation") {
  auto g = tst::rng(63);
  GlobalMapState gm(kVoxel, kTrunc);
  const TsdfVolume vol = random_submap_volume(g, 200);
  const RigidPose anchor = tst::random_pose(g, 0.5, 0.8);
  gm.add_submap(1, vol, anchor);
  const RigidPose world = tst::random_pose(g, 0.5, 0.8);
  gm.record_pose(1, 4, world);

  const ContributionField c = gm.submap_contribution(1, 4);
  REQUIRE(!c.empty());

  // Direct evaluation with no AABB batching: for each returned voxel,
  // transform its center into the submap frame and interpolate by hand.
  const RigidPose theta = compose(anchor, inverse(world));
  for (const auto& [key, pw] : c) {
    const Vec3 x = voxel_center(key, kVoxel);
    const Vec3 xs = theta.apply(x);
    const Vec3 grid = xs / kVoxel - Vec3(0.5, 0.5, 0.5);
    double wsum = 0.0, psum = 0.0;
    for (int dx = 0; dx < 2; ++dx)
      for (int dy = 0; dy < 2; ++dy)
        for (int dz = 0; dz < 2; ++dz) {
          const VoxelKey corner{
              static_cast<std::int32_t>(std::floor(grid.x())) + dx,
              static_cast<std::int32_t>(std::floor(grid.y())) + dy,
              static_cast<std::int32_t>(std::floor(grid.z())) + dz};
          auto it = vol.cells().find(corner);
          if (it == vol.cells().end()) continue;
          const double lx = dx ? grid.x() - std::floor(grid.x())
                               : 1.0 - (grid.x() - std::floor(grid.x()));
          const double ly = dy ? grid.y() - std::floor(grid.y())
                               : 1.0 - (grid.y() - std::floor(grid.y()));
          const double lz = dz ? grid.z() - std::floor(grid.z())
                               : 1.0 - (grid.z() - std::floor(grid.z()));
          wsum += lx * ly * lz * it->second.w;
          psum += lx * ly * lz * it->second.w * it->second.d;
        }
    CHECK(pw.w == doctest::Approx(wsum).epsilon(1e-12));
    CHECK(pw.psi == doctest::Approx(psum).epsilon(1e-12));
  }
}

TEST_CASE("unmoved submap leaves the global field bit-identical") {
  auto g = tst::rng(64);
  GlobalMapState gm(kVoxel, kTrunc);
  gm.add_submap(0, random_submap_volume(g), RigidPose::identity());
  gm.record_pose(0, 0, RigidPose::identity());
  gm.global_update(0, {}, 0);

  const TsdfVolume before = gm.global_volume();
  // "Move" with the identical pose at a later index.
  gm.record_pose(0, 1, RigidPose::identity());
  gm.global_update(std::nullopt, {0}, 1);
  const TsdfVolume after = gm.global_volume();
  REQUIRE(before.cells().size() == after.cells().size());
  for (const auto& [key, cell] : before.cells()) {
    CHECK(after.cells().at(key).d == cell.d);
    CHECK(after.cells().at(key).w == cell.w);
  }
}

TEST_CASE("move and move back restores the field") {
  auto g = tst::rng(65);
  GlobalMapState gm(kVoxel, kTrunc);
  const RigidPose pose0 = tst::random_pose(g, 0.3, 0.4);
  gm.add_submap(0, random_submap_volume(g), RigidPose::identity());
  gm.record_pose(0, 0, pose0);
  gm.global_update(0, {}, 0);
  const TsdfVolume before = gm.global_volume();

  RigidPose pose1 = compose(tst::random_pose(g, 0.2, 0.3), pose0);
  gm.record_pose(0, 1, pose1);
  gm.global_update(std::nullopt, {0}, 1);
  gm.record_pose(0, 2, pose0);
  gm.global_update(std::nullopt, {0}, 2);

  const TsdfVolume after = gm.global_volume();
  REQUIRE(before.cells().size() == after.cells().size());
  for (const auto& [key, cell] : before.cells()) {
    const auto& a = after.cells().at(key);
    CHECK(std::abs(a.d - cell.d) < 1e-12);
    CHECK(std::abs(a.w - cell.w) < 1e-12);
  }
}

TEST_CASE("incremental updates equal the from-scratch rebuild") {
  auto g = tst::rng(66);
  GlobalMapState gm(kVoxel, kTrunc);

  // Two submaps integrated, then B moves.
  gm.add_submap(0, random_submap_volume(g), RigidPose::identity());
  gm.record_pose(0, 0, RigidPose::identity());
  gm.global_update(0, {}, 0);

  const RigidPose b_pose = tst::random_pose(g, 0.4, 0.3);
  gm.add_submap(1, random_submap_volume(g), tst::random_pose(g, 0.2, 0.2));
  gm.record_pose(0, 1, RigidPose::identity());
  gm.record_pose(1, 1, b_pose);
  gm.global_update(1, {}, 1);

  gm.record_pose(0, 2, RigidPose::identity());
  gm.record_pose(1, 2, compose(tst::random_pose(g, 0.3, 0.2), b_pose));
  gm.global_update(std::nullopt, gm.compute_moved(2, {}), 2);

  check_equals_rebuild(gm, 1e-9);
}

TEST_CASE("randomized merge scenarios equal rebuild") {
  for (int seed = 0; seed < 10; ++seed) {
    auto g = tst::rng(1000 + seed);
    std::uniform_int_distribution<int> n_submaps(1, 5);
    std::uniform_int_distribution<int> n_moves(0, 3);
    GlobalMapState gm(kVoxel, kTrunc);

    const int ns = n_submaps(g);
    int n = 0;
    std::vector<RigidPose> cur;
    for (int k = 0; k < ns; ++k) {
      gm.add_submap(k, random_submap_volume(g, 120), tst::random_pose(g, 0.3, 0.3));
      cur.push_back(tst::random_pose(g, 0.6, 0.5));
      for (int s = 0; s <= k; ++s) gm.record_pose(s, n, cur[s]);
      gm.global_update(k, gm.compute_moved(n, {}), n);
      ++n;
    }
    const int moves = n_moves(g);
    for (int m = 0; m < moves; ++m) {
      std::uniform_int_distribution<int> pick(0, ns - 1);
      const int k = pick(g);
      cur[k] = compose(tst::random_pose(g, 0.2, 0.2), cur[k]);
      for (int s = 0; s < ns; ++s) gm.record_pose(s, n, cur[s]);
      gm.global_update(std::nullopt, gm.compute_moved(n, {}), n);
      ++n;
    }
    check_equals_rebuild(gm, 1e-9);
  }
}

TEST_CASE("update preconditions") {
  auto g = tst::rng(67);
  GlobalMapState gm(kVoxel, kTrunc);
  gm.add_submap(0, random_submap_volume(g), RigidPose::identity());
  gm.record_pose(0, 0, RigidPose::identity());
  // Moving a submap that was never integrated.
  CHECK_THROWS_AS(gm.global_update(std::nullopt, {0}, 0), std::invalid_argument);
  gm.global_update(0, {}, 0);
  // Integrating twice.
  gm.record_pose(0, 1, RigidPose::identity());
  CHECK_THROWS_AS(gm.global_update(0, {}, 1), std::invalid_argument);
  // Contribution at a pose index that was never recorded.
  CHECK_THROWS_AS(gm.submap_contribution(0, 99), std::invalid_argument);
}

TEST_CASE("nearest-neighbor interpolation fallback stays consistent") {
  auto g = tst::rng(68);
  GlobalMapState gm(kVoxel, kTrunc);
  gm.set_nearest_interpolation(true);
  const TsdfVolume vol = random_submap_volume(g);
  gm.add_submap(0, vol, RigidPose::identity());
  gm.record_pose(0, 0, RigidPose::identity());
  gm.global_update(0, {}, 0);
  const TsdfVolume out = gm.global_volume();
  REQUIRE(out.cells().size() == vol.cells().size());
  for (const auto& [key, cell] : vol.cells()) {
    CHECK(out.cells().at(key).d == doctest::Approx(cell.d).epsilon(1e-12));
    CHECK(out.cells().at(key).w == doctest::Approx(cell.w).epsilon(1e-12));
  }
}
