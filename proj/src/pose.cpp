#include "subslam/pose.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace subslam {

namespace {
constexpr double kSmallAngle = 1e-4;
}

Mat3 orthonormalize(const Mat3& R) {
  const double err = (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (err < 1e-4) {
    // Newton step toward the polar factor; quadratic convergence near SO(3).
    return 1.5 * R - 0.5 * R * (R.transpose() * R);
  }
  Eigen::JacobiSVD<Mat3> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 out = svd.matrixU() * svd.matrixV().transpose();
  if (out.determinant() < 0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1;
    out = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return out;
}

bool RigidPose::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  if ((rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() > tol)
    return false;
  return rotation.determinant() > 0;
}

RigidPose compose(const RigidPose& a, const RigidPose& b) {
  RigidPose out;
  out.rotation = orthonormalize(a.rotation * b.rotation);
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

RigidPose inverse(const RigidPose& a) {
  RigidPose out;
  out.rotation = a.rotation.transpose();
  out.translation = -(a.rotation.transpose() * a.translation);
  return out;
}

Mat3 so3_exp(const Vec3& omega) {
  const double theta = omega.norm();
  if (theta < kSmallAngle) {
    const Mat3 W = skew(omega);
    // exp(W) = I + W + W^2/2 to O(theta^3); plenty below kSmallAngle.
    return orthonormalize(Mat3::Identity() + W + 0.5 * W * W);
  }
  return Eigen::AngleAxisd(theta, omega / theta).toRotationMatrix();
}

Vec3 so3_log(const Mat3& R) {
  Vec3 w;  // = 2 sin(theta) * axis
  w << R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1);
  // Taking sin from the antisymmetric part keeps the axis accurate near
  // pi, where acos alone degrades badly.
  const double sin_theta = 0.5 * w.norm();
  const double cos_theta = std::clamp((R.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double theta = std::atan2(sin_theta, cos_theta);
  if (theta > M_PI - 1e-6)
    throw std::domain_error("so3_log: rotation angle near pi, log map near-singular");
  if (theta < kSmallAngle) {
    return (0.5 + theta * theta / 12.0) * w;
  }
  return (theta / (2.0 * sin_theta)) * w;
}

Mat3 so3_left_jacobian(const Vec3& omega) {
  const double theta = omega.norm();
  const Mat3 W = skew(omega);
  if (theta < kSmallAngle) {
    return Mat3::Identity() + 0.5 * W + (1.0 / 6.0) * W * W;
  }
  const double t2 = theta * theta;
  const double a = (1.0 - std::cos(theta)) / t2;
  const double b = (theta - std::sin(theta)) / (t2 * theta);
  return Mat3::Identity() + a * W + b * W * W;
}

Mat3 so3_left_jacobian_inv(const Vec3& omega) {
  const double theta = omega.norm();
  const Mat3 W = skew(omega);
  if (theta < kSmallAngle) {
    return Mat3::Identity() - 0.5 * W + (1.0 / 12.0) * W * W;
  }
  const double t2 = theta * theta;
  const double c = 1.0 / t2 - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  return Mat3::Identity() - 0.5 * W + c * W * W;
}

RigidPose se3_exp(const Twist& t) {
  RigidPose out;
  out.rotation = so3_exp(t.rotation);
  out.translation = so3_left_jacobian(t.rotation) * t.translation;
  return out;
}

Twist se3_log(const RigidPose& p) {
  Twist t;
  t.rotation = so3_log(p.rotation);
  t.translation = so3_left_jacobian_inv(t.rotation) * p.translation;
  return t;
}

Mat6 se3_adjoint(const RigidPose& p) {
  Mat6 ad = Mat6::Zero();
  ad.topLeftCorner<3, 3>() = p.rotation;
  ad.topRightCorner<3, 3>() = skew(p.translation) * p.rotation;
  ad.bottomRightCorner<3, 3>() = p.rotation;
  return ad;
}

namespace {

// Coupling block of the SE(3) left Jacobian (Barfoot's Q matrix).
Mat3 se3_q_block(const Vec3& rho, const Vec3& phi) {
  const double theta = phi.norm();
  const Mat3 P = skew(rho);
  const Mat3 W = skew(phi);
  double c1, c2, c3;
  if (theta < 1e-3) {
    const double t2 = theta * theta;
    c1 = 1.0 / 6.0 - t2 / 120.0;
    c2 = -1.0 / 24.0 + t2 / 720.0;
    c3 = 1.0 / 120.0 - t2 / 2520.0;
  } else {
    const double t2 = theta * theta;
    const double t4 = t2 * t2;
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    c1 = (theta - st) / (t2 * theta);
    c2 = (1.0 - t2 / 2.0 - ct) / t4;
    c3 = -0.5 * (c2 - 3.0 * (theta - st - t2 * theta / 6.0) / (t4 * theta));
  }
  return 0.5 * P + c1 * (W * P + P * W + W * P * W) -
         c2 * (W * W * P + P * W * W - 3.0 * W * P * W) +
         c3 * (W * P * W * W + W * W * P * W);
}

}  // namespace

Mat6 se3_left_jacobian(const Twist& t) {
  const Mat3 J = so3_left_jacobian(t.rotation);
  Mat6 out = Mat6::Zero();
  out.topLeftCorner<3, 3>() = J;
  out.topRightCorner<3, 3>() = se3_q_block(t.translation, t.rotation);
  out.bottomRightCorner<3, 3>() = J;
  return out;
}

Mat6 se3_left_jacobian_inv(const Twist& t) {
  const Mat3 Jinv = so3_left_jacobian_inv(t.rotation);
  const Mat3 Q = se3_q_block(t.translation, t.rotation);
  Mat6 out = Mat6::Zero();
  out.topLeftCorner<3, 3>() = Jinv;
  out.topRightCorner<3, 3>() = -Jinv * Q * Jinv;
  out.bottomRightCorner<3, 3>() = Jinv;
  return out;
}

Mat6 se3_right_jacobian_inv(const Twist& t) {
  return se3_left_jacobian_inv({-t.rotation, -t.translation});
}

double rotation_angle(const Mat3& a, const Mat3& b) {
  const double c = std::clamp(((a * b.transpose()).trace() - 1.0) * 0.5, -1.0, 1.0);
  return std::acos(c);
}

Eigen::Quaterniond to_quaternion(const Mat3& R) {
  Eigen::Quaterniond q(R);
  q.normalize();
  if (q.w() < 0) q.coeffs() = -q.coeffs();
  return q;
}

Mat3 from_quaternion(const Eigen::Quaterniond& q) {
  return q.normalized().toRotationMatrix();
}

}  // namespace subslam
