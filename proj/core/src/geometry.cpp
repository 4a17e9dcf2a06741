#include "camreloc/geometry.hpp"

#include <cmath>

namespace camreloc {

Vec2 project(const Intrinsics& K, const PoseSE3& M, const Vec3& world_point) {
  const Vec3 cam = M.apply(world_point);
  if (!(cam.z() > 0.0)) {
    throw Error(ErrorCode::NonPositiveDepth, "point behind or on the camera plane");
  }
  const double inv_z = 1.0 / cam.z();
  const double u = (K.fx * cam.x() + K.skew * cam.y()) * inv_z + K.cx;
  const double v = K.fy * cam.y() * inv_z + K.cy;
  return Vec2(u, v);
}

Vec3 backproject(const Intrinsics& K, const Vec2& pixel, double depth) {
  if (!(depth > 0.0)) {
    throw Error(ErrorCode::NonPositiveDepth, "depth must be positive");
  }
  // Unrolled K^-1 [u v 1]^T, scaled by z.
  const double y = (pixel.y() - K.cy) / K.fy;
  const double x = (pixel.x() - K.cx - K.skew * y) / K.fx;
  return Vec3(x * depth, y * depth, depth);
}

PoseSE3 compose(const PoseSE3& a, const PoseSE3& b) {
  return PoseSE3(a.rotation() * b.rotation(), a.rotation() * b.translation() + a.translation());
}

PoseSE3 invert(const PoseSE3& a) {
  const Mat3 rt = a.rotation().transpose();
  return PoseSE3(rt, -(rt * a.translation()));
}

Mat3 rotation_about_axis(const Vec3& unit_axis, double angle_rad) {
  return Eigen::AngleAxisd(angle_rad, unit_axis).toRotationMatrix();
}

UnitQuaternion rotation_to_quaternion(const Mat3& r) {
  const Eigen::Quaterniond q(r);
  return UnitQuaternion::normalized(q.w(), q.x(), q.y(), q.z());
}

Mat3 quaternion_to_rotation(const UnitQuaternion& q) {
  return Eigen::Quaterniond(q.w, q.x, q.y, q.z).normalized().toRotationMatrix();
}

EulerZYX rotation_to_euler(const Mat3& r) {
  // R = Rz(yaw) Ry(pitch) Rx(roll):
  //   [ cy*cp   cy*sp*sr - sy*cr   cy*sp*cr + sy*sr ]
  //   [ sy*cp   sy*sp*sr + cy*cr   sy*sp*cr - cy*sr ]
  //   [ -sp     cp*sr              cp*cr            ]
  EulerZYX e;
  const double sp = -r(2, 0);
  const double clamped = std::clamp(sp, -1.0, 1.0);
  const double pitch = std::asin(clamped);
  const double cp = std::cos(pitch);
  e.pitch_deg = rad2deg(pitch);
  if (std::abs(std::abs(e.pitch_deg) - 90.0) <= 1e-6) {
    e.gimbal_lock = true;
    // Only yaw -/+ roll is observable; pick roll = 0.
    e.roll_deg = 0.0;
    e.yaw_deg = rad2deg(std::atan2(-r(0, 1), r(1, 1)));
  } else {
    e.yaw_deg = rad2deg(std::atan2(r(1, 0) / cp, r(0, 0) / cp));
    e.roll_deg = rad2deg(std::atan2(r(2, 1) / cp, r(2, 2) / cp));
  }
  return e;
}

Mat3 euler_to_rotation(const EulerZYX& e) {
  const Eigen::AngleAxisd yaw(deg2rad(e.yaw_deg), Vec3::UnitZ());
  const Eigen::AngleAxisd pitch(deg2rad(e.pitch_deg), Vec3::UnitY());
  const Eigen::AngleAxisd roll(deg2rad(e.roll_deg), Vec3::UnitX());
  return (yaw * pitch * roll).toRotationMatrix();
}

}  // namespace camreloc
