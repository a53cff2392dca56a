// Rigid 3D poses and the SO(3)/SE(3) maps used by registration and
// graph optimization. Rotations are stored as matrices and renormalized
// on every composition so long chains stay orthonormal; quaternions are
// used only at file boundaries.

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace subslam {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  // clang-format off
  s <<    0, -v.z(),  v.y(),
       v.z(),     0, -v.x(),
      -v.y(),  v.x(),     0;
  // clang-format on
  return s;
}

// Projects a near-orthonormal matrix back onto SO(3). One Newton step of
// the polar decomposition is enough for composition round-off; the SVD
// branch handles anything further out.
Mat3 orthonormalize(const Mat3& R);

Mat3 so3_exp(const Vec3& omega);

// Inverse of so3_exp. Throws std::domain_error within 1e-6 of the pi
// singularity where the axis is not recoverable at full precision.
Vec3 so3_log(const Mat3& R);

// Left Jacobian of SO(3) and its inverse.
Mat3 so3_left_jacobian(const Vec3& omega);
Mat3 so3_left_jacobian_inv(const Vec3& omega);

struct RigidPose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidPose identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    return m;
  }

  bool is_valid(double tol = 1e-6) const;

  EIGEN_MAKE_ALIGNED_OPERATOR_NEW
};

RigidPose compose(const RigidPose& a, const RigidPose& b);
RigidPose inverse(const RigidPose& a);

inline RigidPose operator*(const RigidPose& a, const RigidPose& b) {
  return compose(a, b);
}

// se(3) element: rotation vector (radians) plus translational part (meters).
// Packed 6-vectors are ordered [translation; rotation].
struct Twist {
  Vec3 rotation = Vec3::Zero();
  Vec3 translation = Vec3::Zero();

  Vec6 vector() const {
    Vec6 v;
    v << translation, rotation;
    return v;
  }
  static Twist from_vector(const Vec6& v) {
    return {v.tail<3>(), v.head<3>()};
  }
  double norm() const { return vector().norm(); }
};

// True SE(3) exponential/logarithm (translation coupled through the SO(3)
// left Jacobian).
RigidPose se3_exp(const Twist& t);
Twist se3_log(const RigidPose& p);

// Adjoint of SE(3) acting on [translation; rotation] twists.
Mat6 se3_adjoint(const RigidPose& p);

// Left Jacobian of SE(3) and its inverse (Barfoot's closed form with the
// coupling block); right variants via J_r(x) = J_l(-x).
Mat6 se3_left_jacobian(const Twist& t);
Mat6 se3_left_jacobian_inv(const Twist& t);
Mat6 se3_right_jacobian_inv(const Twist& t);

// Rotation angle between two orientations, radians.
double rotation_angle(const Mat3& a, const Mat3& b = Mat3::Identity());

// Quaternion conversions for file interchange (x, y, z, w order as in TUM
// lines). Round-trips within 1e-12.
Eigen::Quaterniond to_quaternion(const Mat3& R);
Mat3 from_quaternion(const Eigen::Quaterniond& q);

}  // namespace subslam
