#include "subslam/global_map.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace subslam {

bool reprocess_decision(const RigidPose& old_pose, const RigidPose& new_pose,
                        const ReprocessConfig& cfg) {
  const double dt = (new_pose.translation - old_pose.translation).norm();
  if (dt > cfg.trans_thresh) return true;
  // Strict inequality, compared in the cosine domain so a rotation
  // constructed exactly at the threshold never trips on acos round-off.
  const double cos_rel = std::clamp(
      ((old_pose.rotation * new_pose.rotation.transpose()).trace() - 1.0) * 0.5,
      -1.0, 1.0);
  return cos_rel < std::cos(cfg.rot_thresh) - 1e-15;
}

void GlobalMapState::add_submap(int id, TsdfVolume volume, const RigidPose& odom_pose) {
  if (submaps_.count(id))
    throw std::invalid_argument("GlobalMapState: duplicate submap id");
  volumes_.emplace(id, std::move(volume));
  odom_poses_.emplace(id, odom_pose);
  submaps_.insert(id);
}

void GlobalMapState::record_pose(int id, int n, const RigidPose& world_pose) {
  if (!submaps_.count(id))
    throw std::invalid_argument("GlobalMapState: record_pose for unknown submap");
  pose_history_[id][n] = world_pose;
}

const RigidPose& GlobalMapState::pose_at(int id, int n) const {
  auto hist = pose_history_.find(id);
  if (hist == pose_history_.end() || !hist->second.count(n))
    throw std::invalid_argument("GlobalMapState: missing pose index " +
                                std::to_string(n) + " for submap " +
                                std::to_string(id));
  return hist->second.at(n);
}

PsiW GlobalMapState::sample(const TsdfVolume& v, const Vec3& p) const {
  const double vs = v.voxel_size();
  if (nearest_) {
    auto it = v.cells().find(voxel_key_of(p, vs));
    if (it == v.cells().end()) return {};
    return {it->second.w * it->second.d, it->second.w};
  }
  // Weighted trilinear: psi and w are both linear in the stored cells, so
  // the implied distance is the weight-blended interpolant.
  const Vec3 g = p / vs - Vec3(0.5, 0.5, 0.5);
  std::int32_t bx = static_cast<std::int32_t>(std::floor(g.x()));
  std::int32_t by = static_cast<std::int32_t>(std::floor(g.y()));
  std::int32_t bz = static_cast<std::int32_t>(std::floor(g.z()));
  double fx = g.x() - bx, fy = g.y() - by, fz = g.z() - bz;
  // Snap lattice-aligned samples so exact grid coincidence does not leak
  // round-off weight into neighboring cells.
  auto snap = [](double& f, std::int32_t& b) {
    if (f < 1e-9) {
      f = 0.0;
    } else if (f > 1.0 - 1e-9) {
      f = 0.0;
      ++b;
    }
  };
  snap(fx, bx);
  snap(fy, by);
  snap(fz, bz);
  PsiW out;
  for (int dx = 0; dx < 2; ++dx)
    for (int dy = 0; dy < 2; ++dy)
      for (int dz = 0; dz < 2; ++dz) {
        const double lam = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy) *
                           (dz ? fz : 1.0 - fz);
        if (lam == 0.0) continue;
        auto it = v.cells().find({bx + dx, by + dy, bz + dz});
        if (it == v.cells().end()) continue;
        out.w += lam * it->second.w;
        out.psi += lam * it->second.w * it->second.d;
      }
  return out;
}

ContributionField GlobalMapState::submap_contribution(int k, int q) const {
  auto vol_it = volumes_.find(k);
  if (vol_it == volumes_.end())
    throw std::invalid_argument("GlobalMapState: unknown submap " + std::to_string(k));
  const TsdfVolume& vol = vol_it->second;
  const RigidPose& world_pose = pose_at(k, q);
  const RigidPose& odom_pose = odom_poses_.at(k);
  // theta maps world points into the submap frame; its inverse places the
  // submap in the world.
  const RigidPose theta = compose(odom_pose, inverse(world_pose));
  const RigidPose theta_inv = inverse(theta);

  ContributionField out;
  if (vol.cells().empty()) return out;

  // Metric bounds of the stored cell centers, padded by the sampling reach.
  const double svs = vol.voxel_size();
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const auto& [key, cell] : vol.cells()) {
    const Vec3 c = voxel_center(key, svs);
    lo = lo.cwiseMin(c);
    hi = hi.cwiseMax(c);
  }
  lo -= Vec3::Constant(svs);
  hi += Vec3::Constant(svs);

  // World AABB of the padded submap box.
  Vec3 wlo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 whi = -wlo;
  for (int corner = 0; corner < 8; ++corner) {
    const Vec3 c(corner & 1 ? hi.x() : lo.x(), corner & 2 ? hi.y() : lo.y(),
                 corner & 4 ? hi.z() : lo.z());
    const Vec3 w = theta_inv.apply(c);
    wlo = wlo.cwiseMin(w);
    whi = whi.cwiseMax(w);
  }

  const VoxelKey kmin = voxel_key_of(wlo, voxel_size_);
  const VoxelKey kmax = voxel_key_of(whi, voxel_size_);
  for (std::int32_t x = kmin.x; x <= kmax.x; ++x)
    for (std::int32_t y = kmin.y; y <= kmax.y; ++y)
      for (std::int32_t z = kmin.z; z <= kmax.z; ++z) {
        const VoxelKey key{x, y, z};
        const PsiW s = sample(vol, theta.apply(voxel_center(key, voxel_size_)));
        if (s.w > 1e-12) out.emplace(key, s);
      }
  return out;
}

void GlobalMapState::global_update(std::optional<int> new_submap,
                                   const std::set<int>& moved, int n) {
  if (new_submap) {
    if (phi_.count(*new_submap))
      throw std::invalid_argument("GlobalMapState: submap already integrated");
    const ContributionField c = submap_contribution(*new_submap, n);
    for (const auto& [key, pw] : c) {
      Accum& a = field_[key];
      a.num += pw.psi;
      a.w += pw.w;
    }
    phi_[*new_submap] = n;
  }

  for (int k : moved) {
    auto phi_it = phi_.find(k);
    if (phi_it == phi_.end())
      throw std::invalid_argument("GlobalMapState: moved submap not integrated");
    // Difference of the re-added and removed contributions first, so an
    // unchanged pose cancels exactly.
    ContributionField delta = submap_contribution(k, n);
    const ContributionField old_c = submap_contribution(k, phi_it->second);
    for (const auto& [key, pw] : old_c) {
      PsiW& d = delta[key];
      d.psi -= pw.psi;
      d.w -= pw.w;
    }
    for (const auto& [key, pw] : delta) {
      if (pw.psi == 0.0 && pw.w == 0.0) continue;
      Accum& a = field_[key];
      a.num += pw.psi;
      a.w += pw.w;
    }
    phi_it->second = n;
  }

  // Fully retracted cells disappear.
  for (auto it = field_.begin(); it != field_.end();) {
    if (it->second.w <= 1e-12)
      it = field_.erase(it);
    else
      ++it;
  }
}

std::set<int> GlobalMapState::compute_moved(int n, const ReprocessConfig& cfg) const {
  std::set<int> moved;
  for (const auto& [id, phi] : phi_) {
    const auto& hist = pose_history_.at(id);
    auto cur = hist.find(n);
    if (cur == hist.end()) continue;
    if (reprocess_decision(hist.at(phi), cur->second, cfg)) moved.insert(id);
  }
  return moved;
}

TsdfVolume GlobalMapState::global_volume() const {
  TsdfVolume v(voxel_size_, truncation_);
  for (const auto& [key, a] : field_) {
    const double d = std::clamp(a.num / a.w, -truncation_, truncation_);
    v.cells_[key] = {d, a.w};
  }
  return v;
}

}  // namespace subslam
