// Independent reference implementations the tests check the production
// code against. These deliberately take different routes: homogeneous 4x4
// products for pose algebra, characteristic-polynomial eigensolving for
// normals, series-summed Lie Jacobians and a dense numeric-differentiation
// solver for the factor graph.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <vector>

#include "subslam/factor_graph.hpp"
#include "subslam/pose.hpp"

namespace subslam::oracle {

// ---- pose algebra via homogeneous matrices -------------------------------

inline Eigen::Matrix4d hom(const RigidPose& p) { return p.matrix(); }

inline RigidPose from_hom(const Eigen::Matrix4d& m) {
  RigidPose p;
  p.rotation = m.topLeftCorner<3, 3>();
  p.translation = m.topRightCorner<3, 1>();
  return p;
}

inline RigidPose compose_hom(const RigidPose& a, const RigidPose& b) {
  return from_hom(Eigen::Matrix4d(hom(a) * hom(b)));
}

inline RigidPose inverse_hom(const RigidPose& a) {
  return from_hom(Eigen::Matrix4d(hom(a).inverse()));
}

// ---- smallest-eigenvalue eigenvector via the characteristic cubic --------

// Solves det(C - l I) = 0 directly and extracts the eigenvector of the
// smallest root by cross products; no iterative eigensolver involved.
inline void eigen_smallest_cubic(const Mat3& C_in, double* eval_out, Vec3* evec_out) {
  // Scale to unit magnitude first; eigenvectors are scale-invariant and the
  // cubic is much better conditioned.
  const double scale = C_in.cwiseAbs().maxCoeff();
  const Mat3 C = scale > 0 ? Mat3(C_in / scale) : C_in;

  // Characteristic polynomial l^3 - c2 l^2 + c1 l - c0.
  const double c2 = C.trace();
  const double c1 = C(0, 0) * C(1, 1) - C(0, 1) * C(1, 0) + C(0, 0) * C(2, 2) -
                    C(0, 2) * C(2, 0) + C(1, 1) * C(2, 2) - C(1, 2) * C(2, 1);
  const double c0 = C.determinant();

  // Depressed cubic s^3 + p s + q with l = s + c2/3; symmetric C gives
  // three real roots (trigonometric form).
  const double p = c1 - c2 * c2 / 3.0;
  const double q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
  double lmin;
  if (std::abs(p) < 1e-30) {
    lmin = c2 / 3.0 + std::cbrt(-q);
  } else {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg =
        std::clamp(3.0 * q / (p * m), -1.0, 1.0);  // = cos(3 theta)
    const double theta = std::acos(arg) / 3.0;
    double roots[3];
    for (int k = 0; k < 3; ++k)
      roots[k] = c2 / 3.0 + m * std::cos(theta - 2.0 * M_PI * k / 3.0);
    lmin = std::min({roots[0], roots[1], roots[2]});
  }
  if (eval_out) *eval_out = lmin * scale;

  if (evec_out) {
    const Mat3 A = C - lmin * Mat3::Identity();
    // Null direction = cross product of the two most independent rows.
    Vec3 best = Vec3::Zero();
    double best_norm = -1.0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        const Vec3 c = A.row(i).transpose().cross(A.row(j).transpose());
        if (c.norm() > best_norm) {
          best_norm = c.norm();
          best = c;
        }
      }
    Vec3 v = best.normalized();
    // Two steps of shifted inverse iteration polish the root's direction.
    for (int it = 0; it < 2; ++it) {
      const Mat3 shifted = C - (lmin - 1e-12) * Mat3::Identity();
      const Vec3 next = shifted.fullPivLu().solve(v);
      if (next.norm() > 0) v = next.normalized();
    }
    *evec_out = v;
  }
}

// ---- series-based se(3) log (independent of the closed forms) ------------

inline Vec3 so3_log_series(const Mat3& R) {
  Eigen::AngleAxisd aa(R);
  return aa.angle() * aa.axis();
}

// Left Jacobian summed term by term: J = sum_k (ad)^k / (k+1)!.
inline Mat3 so3_left_jacobian_series(const Vec3& w) {
  const Mat3 W = skew(w);
  Mat3 term = Mat3::Identity();
  Mat3 sum = Mat3::Zero();
  double fact = 1.0;
  for (int k = 0; k < 40; ++k) {
    fact *= (k + 1);
    sum += term / fact;
    term = term * W;
  }
  return sum;
}

inline Twist se3_log_series(const RigidPose& p) {
  Twist t;
  t.rotation = so3_log_series(p.rotation);
  t.translation =
      so3_left_jacobian_series(t.rotation).inverse() * p.translation;
  return t;
}

// ---- dense factor-graph solver with numeric Jacobians --------------------

// Gauss-Newton over all node twists, residual Jacobians by central
// differences, dense normal equations. Minimizes the same cost as
// FactorGraph::optimize but shares none of its derivative code.
inline double dense_graph_solve(const std::vector<NodeId>& ids,
                                std::map<NodeId, RigidPose> poses,
                                const std::vector<Factor>& factors,
                                int outer_iters = 200) {
  auto residual = [&](const Factor& f,
                      const std::map<NodeId, RigidPose>& x) -> Vec6 {
    if (f.kind == Factor::Kind::kPrior)
      return se3_log_series(
                 oracle::compose_hom(oracle::inverse_hom(f.measurement), x.at(f.i)))
          .vector();
    const RigidPose rel =
        oracle::compose_hom(oracle::inverse_hom(x.at(f.i)), x.at(f.j));
    return se3_log_series(oracle::compose_hom(oracle::inverse_hom(f.measurement), rel))
        .vector();
  };
  auto total_cost = [&](const std::map<NodeId, RigidPose>& x) {
    double c = 0.0;
    for (const auto& f : factors) {
      const Vec6 r = residual(f, x);
      c += r.dot(f.information * r);
    }
    return c;
  };
  auto perturb = [](const RigidPose& p, int k, double h) {
    Vec6 d = Vec6::Zero();
    d[k] = h;
    return compose(p, se3_exp(Twist::from_vector(d)));
  };

  std::map<NodeId, int> col;
  for (std::size_t i = 0; i < ids.size(); ++i) col[ids[i]] = static_cast<int>(6 * i);
  const int dim = static_cast<int>(6 * ids.size());

  double cost = total_cost(poses);
  double lambda = 1e-6;
  for (int it = 0; it < outer_iters; ++it) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    const double h = 1e-6;
    for (const auto& f : factors) {
      const Vec6 r0 = residual(f, poses);
      std::vector<NodeId> touched = {f.i};
      if (f.kind == Factor::Kind::kBetween) touched.push_back(f.j);
      Eigen::MatrixXd J = Eigen::MatrixXd::Zero(6, 6 * touched.size());
      for (std::size_t t = 0; t < touched.size(); ++t) {
        for (int k = 0; k < 6; ++k) {
          auto xp = poses;
          auto xm = poses;
          xp[touched[t]] = perturb(poses[touched[t]], k, h);
          xm[touched[t]] = perturb(poses[touched[t]], k, -h);
          J.col(6 * t + k) = (residual(f, xp) - residual(f, xm)) / (2 * h);
        }
      }
      for (std::size_t a = 0; a < touched.size(); ++a)
        for (std::size_t b = 0; b < touched.size(); ++b)
          H.block<6, 6>(col[touched[a]], col[touched[b]]) +=
              J.middleCols<6>(6 * a).transpose() * f.information *
              J.middleCols<6>(6 * b);
      for (std::size_t a = 0; a < touched.size(); ++a)
        g.segment<6>(col[touched[a]]) +=
            J.middleCols<6>(6 * a).transpose() * f.information * r0;
    }
    H.diagonal().array() += lambda;
    const Eigen::VectorXd delta = H.ldlt().solve(-g);
    auto trial = poses;
    for (NodeId id : ids) {
      Vec6 d = delta.segment<6>(col[id]);
      trial[id] = compose(trial[id], se3_exp(Twist::from_vector(d)));
    }
    const double trial_cost = total_cost(trial);
    if (trial_cost <= cost) {
      poses = std::move(trial);
      cost = trial_cost;
      lambda = std::max(lambda * 0.5, 1e-12);
      if (delta.norm() < 1e-10) break;
    } else {
      lambda *= 10.0;
    }
  }
  return cost;
}

}  // namespace subslam::oracle
