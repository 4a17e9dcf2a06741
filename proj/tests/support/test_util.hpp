#pragma once

#include <cmath>

#include "camreloc/geometry.hpp"
#include "camreloc/rng.hpp"

namespace camreloc::testutil {

inline Mat3 random_rotation(Rng& rng) {
  // uniform over SO(3) via a random unit quaternion
  const double u1 = rng.uniform01();
  const double u2 = rng.uniform01();
  const double u3 = rng.uniform01();
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  const Eigen::Quaterniond q(a * std::sin(2.0 * kPi * u2), a * std::cos(2.0 * kPi * u2),
                             b * std::sin(2.0 * kPi * u3), b * std::cos(2.0 * kPi * u3));
  return q.normalized().toRotationMatrix();
}

inline PoseSE3 random_pose(Rng& rng, double translation_range = 5.0) {
  return PoseSE3(random_rotation(rng),
                 Vec3(rng.uniform(-translation_range, translation_range),
                      rng.uniform(-translation_range, translation_range),
                      rng.uniform(-translation_range, translation_range)));
}

inline Intrinsics random_intrinsics(Rng& rng) {
  return Intrinsics(rng.uniform(150.0, 600.0), rng.uniform(150.0, 600.0),
                    rng.uniform(100.0, 400.0), rng.uniform(80.0, 300.0),
                    rng.uniform(-1.0, 1.0));
}

}  // namespace camreloc::testutil
