#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "camreloc/error.hpp"

namespace camreloc {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

/// Pinhole calibration. The induced matrix is
///   [fx skew cx; 0 fy cy; 0 0 1].
struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double skew = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  Intrinsics() = default;
  Intrinsics(double fx_, double fy_, double cx_, double cy_, double skew_ = 0.0)
      : fx(fx_), fy(fy_), skew(skew_), cx(cx_), cy(cy_) {
    if (!(fx > 0.0) || !(fy > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "focal lengths must be positive");
    }
  }

  Mat3 matrix() const {
    Mat3 k;
    k << fx, skew, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
    return k;
  }

  Mat3 inverse_matrix() const { return matrix().inverse(); }
};

/// Rigid world-to-camera transform M = [R | t]: x_cam = R x_world + t.
class PoseSE3 {
 public:
  PoseSE3() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}

  PoseSE3(const Mat3& rotation, const Vec3& translation)
      : rotation_(rotation), translation_(translation) {
    const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).norm();
    if (ortho > 1e-6 || rotation.determinant() < 0.0) {
      throw Error(ErrorCode::MalformedPose, "rotation is not a proper orthonormal matrix");
    }
  }

  static PoseSE3 identity() { return PoseSE3(); }

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Mat34 matrix() const {
    Mat34 m;
    m.leftCols<3>() = rotation_;
    m.col(3) = translation_;
    return m;
  }

  Eigen::Matrix4d homogeneous() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation_;
    m.topRightCorner<3, 1>() = translation_;
    return m;
  }

  Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }

  /// Camera center in the source (world) frame: C = -R^T t.
  Vec3 center() const { return -(rotation_.transpose() * translation_); }

  bool operator==(const PoseSE3& other) const {
    return rotation_ == other.rotation_ && translation_ == other.translation_;
  }

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

struct UnitQuaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static UnitQuaternion normalized(double w, double x, double y, double z) {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (!(n > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "cannot normalize zero quaternion");
    }
    return UnitQuaternion{w / n, x / n, y / n, z / n};
  }

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

  /// Same rotation, representative with w >= 0 (first nonzero component positive).
  UnitQuaternion canonical() const {
    const double* c[4] = {&w, &x, &y, &z};
    for (const double* v : c) {
      if (*v > 0.0) return *this;
      if (*v < 0.0) return UnitQuaternion{-w, -x, -y, -z};
    }
    return *this;
  }

  Eigen::Vector4d coeffs_wxyz() const { return Eigen::Vector4d(w, x, y, z); }
};

/// Intrinsic Z-Y-X (yaw-pitch-roll) angles in degrees: R = Rz(yaw) Ry(pitch) Rx(roll).
struct EulerZYX {
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
  double roll_deg = 0.0;
  bool gimbal_lock = false;  // |pitch| within 1e-6 deg of 90; angles are a canonical pick
};

/// p = K M P after homogeneous normalization. Throws NonPositiveDepth if the
/// transformed point has z <= 0.
Vec2 project(const Intrinsics& K, const PoseSE3& M, const Vec3& world_point);

/// Camera-frame point [K^-1 p z ; z] at the given depth. Throws NonPositiveDepth.
Vec3 backproject(const Intrinsics& K, const Vec2& pixel, double depth);

/// compose(A, B): apply B first, then A (x -> A(B(x))).
PoseSE3 compose(const PoseSE3& a, const PoseSE3& b);
PoseSE3 invert(const PoseSE3& a);

Mat3 rotation_about_axis(const Vec3& unit_axis, double angle_rad);

UnitQuaternion rotation_to_quaternion(const Mat3& r);
Mat3 quaternion_to_rotation(const UnitQuaternion& q);

EulerZYX rotation_to_euler(const Mat3& r);
Mat3 euler_to_rotation(const EulerZYX& e);

constexpr double kPi = 3.14159265358979323846;
inline double deg2rad(double d) { return d * (kPi / 180.0); }
inline double rad2deg(double r) { return r * (180.0 / kPi); }

}  // namespace camreloc
