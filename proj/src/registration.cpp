#include "subslam/registration.hpp"

#include <Eigen/Cholesky>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace subslam {

namespace {

// Rotation taking the x-axis onto `n` (any such rotation works; the
// covariance it builds is symmetric about n).
Mat3 rotation_to_normal(const Vec3& n) {
  Vec3 axis = Vec3::UnitX().cross(n);
  const double s = axis.norm();
  const double c = Vec3::UnitX().dot(n);
  if (s < 1e-12) {
    if (c > 0) return Mat3::Identity();
    return Eigen::AngleAxisd(M_PI, Vec3::UnitY()).toRotationMatrix();
  }
  return Eigen::AngleAxisd(std::atan2(s, c), axis / s).toRotationMatrix();
}

Mat3 disk_covariance(const Vec3& normal, double epsilon) {
  const Mat3 Rn = rotation_to_normal(normal);
  Vec3 d(epsilon, 1.0, 1.0);
  return Rn * d.asDiagonal() * Rn.transpose();
}

struct TargetGrid {
  std::unordered_map<VoxelKey, std::vector<int>, VoxelKeyHash> cells;
  double resolution = 0.0;

  // Nearest target surface point within `resolution` of q, or -1.
  int nearest(const std::vector<OrientedSurfacePoint>& pts, const Vec3& q) const {
    const VoxelKey k = voxel_key_of(q, resolution);
    const double r2 = resolution * resolution;
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = cells.find({k.x + dx, k.y + dy, k.z + dz});
          if (it == cells.end()) continue;
          for (int idx : it->second) {
            const double d2 = (pts[idx].mean - q).squaredNorm();
            if (d2 > r2) continue;
            // Ties break on index so the match is order-independent.
            if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
              best = idx;
              best_d2 = d2;
            }
          }
        }
    return best;
  }
};

struct Matches {
  std::vector<int> source_idx;
  std::vector<int> target_idx;
};

// Plane-to-plane error of the match set, normalized so a pure offset d
// along the combined normal scores ~d^2.
double match_error(const Matches& m, const OrientedCloud& source,
                   const OrientedCloud& target, const std::vector<Mat3>& src_cov,
                   const std::vector<Mat3>& tgt_cov, const RigidPose& T,
                   double epsilon) {
  if (m.source_idx.empty()) return std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (std::size_t i = 0; i < m.source_idx.size(); ++i) {
    const auto& sp = source.surface_points[m.source_idx[i]];
    const auto& tp = target.surface_points[m.target_idx[i]];
    const Vec3 r = T.apply(sp.mean) - tp.mean;
    const Mat3 M = (tgt_cov[m.target_idx[i]] +
                    T.rotation * src_cov[m.source_idx[i]] * T.rotation.transpose())
                       .inverse();
    sum += r.dot(M * r);
  }
  return 2.0 * epsilon * sum / static_cast<double>(m.source_idx.size());
}

Matches match(const OrientedCloud& source, const OrientedCloud& target,
              const TargetGrid& grid, const RigidPose& T) {
  Matches m;
  m.source_idx.reserve(source.size());
  for (int i = 0; i < static_cast<int>(source.size()); ++i) {
    const Vec3 q = T.apply(source.surface_points[i].mean);
    const int j = grid.nearest(target.surface_points, q);
    if (j >= 0) {
      m.source_idx.push_back(i);
      m.target_idx.push_back(j);
    }
  }
  return m;
}

}  // namespace

RegistrationResult register_clouds(const OrientedCloud& source,
                                   const OrientedCloud& target,
                                   const RigidPose& prior, double r,
                                   const RegConfig& cfg) {
  if (r <= 0) throw std::invalid_argument("register_clouds: r must be > 0");
  if (source.empty() || target.empty())
    throw std::invalid_argument("register_clouds: insufficient features");

  std::vector<Mat3> src_cov(source.size()), tgt_cov(target.size());
  for (std::size_t i = 0; i < source.size(); ++i)
    src_cov[i] = disk_covariance(source.surface_points[i].normal, cfg.epsilon);
  for (std::size_t i = 0; i < target.size(); ++i)
    tgt_cov[i] = disk_covariance(target.surface_points[i].normal, cfg.epsilon);

  TargetGrid grid;
  grid.resolution = r;
  grid.cells.reserve(target.size());
  for (int i = 0; i < static_cast<int>(target.size()); ++i)
    grid.cells[voxel_key_of(target.surface_points[i].mean, r)].push_back(i);

  RegistrationResult res;
  res.transform = prior;

  Matches m = match(source, target, grid, res.transform);
  if (m.source_idx.empty()) {
    res.matched_fraction = 0.0;
    res.converged = false;
    res.final_error = std::numeric_limits<double>::infinity();
    return res;
  }
  double err = match_error(m, source, target, src_cov, tgt_cov, res.transform, cfg.epsilon);
  res.error_history.push_back(err);

  bool update_below_tol = false;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    // Gauss-Newton normal equations on the left-multiplied twist.
    Mat6 H = Mat6::Zero();
    Vec6 g = Vec6::Zero();
    for (std::size_t i = 0; i < m.source_idx.size(); ++i) {
      const auto& sp = source.surface_points[m.source_idx[i]];
      const auto& tp = target.surface_points[m.target_idx[i]];
      const Vec3 y = res.transform.apply(sp.mean);
      const Vec3 rv = y - tp.mean;
      const Mat3 M = (tgt_cov[m.target_idx[i]] +
                      res.transform.rotation * src_cov[m.source_idx[i]] *
                          res.transform.rotation.transpose())
                         .inverse();
      Eigen::Matrix<double, 3, 6> J;
      J.leftCols<3>() = Mat3::Identity();
      J.rightCols<3>() = -skew(y);
      H += J.transpose() * M * J;
      g += J.transpose() * M * rv;
    }
    // Tiny Tikhonov term keeps degenerate scenes (e.g. parallel planes)
    // pinned to the prior along their unconstrained directions.
    H += (1e-9 * H.trace() / 6.0 + 1e-12) * Mat6::Identity();

    Vec6 delta = H.ldlt().solve(-g);
    res.iterations = iter + 1;

    // Halve the step until the re-matched global error does not increase.
    double applied_norm = 0.0;
    bool improved = false;
    for (int halving = 0; halving < 16; ++halving) {
      const RigidPose candidate =
          compose(se3_exp(Twist::from_vector(delta)), res.transform);
      Matches m_new = match(source, target, grid, candidate);
      const double err_new = m_new.source_idx.empty()
                                 ? std::numeric_limits<double>::infinity()
                                 : match_error(m_new, source, target, src_cov,
                                               tgt_cov, candidate, cfg.epsilon);
      if (err_new <= err) {
        res.transform = candidate;
        m = std::move(m_new);
        err = err_new;
        applied_norm = delta.norm();
        improved = true;
        break;
      }
      delta *= 0.5;
    }
    res.error_history.push_back(err);
    if (!improved || applied_norm < cfg.tol) {
      update_below_tol = true;
      break;
    }
  }

  res.final_error = err;
  res.matched_fraction =
      static_cast<double>(m.source_idx.size()) / static_cast<double>(source.size());
  res.converged = update_below_tol && res.matched_fraction >= cfg.min_match;
  return res;
}

}  // namespace subslam
