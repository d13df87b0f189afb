// Copyright 2026 The seabal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEABAL_SPATIAL_HPP_
#define SEABAL_SPATIAL_HPP_

#include <cmath>

#include "seabal/types.hpp"

namespace seabal {

inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return s;
}

// Rotation vector of R (inverse of the exponential map), principal branch.
inline Vec3 so3_log(const Mat3& r) {
  const double tr = r.trace();
  const double c = std::clamp(0.5 * (tr - 1.0), -1.0, 1.0);
  const double angle = std::acos(c);
  Vec3 axis(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  if (angle < 1e-9) return 0.5 * axis;
  if (angle > M_PI - 1e-6) {
    // Near pi the off-diagonal form degenerates; recover the axis from the
    // diagonal instead.
    Vec3 a;
    for (int i = 0; i < 3; ++i) a[i] = std::sqrt(std::max(0.0, (r(i, i) + 1.0) * 0.5));
    if (a.x() >= a.y() && a.x() >= a.z()) {
      a.y() = std::copysign(a.y(), r(0, 1));
      a.z() = std::copysign(a.z(), r(0, 2));
    } else if (a.y() >= a.z()) {
      a.x() = std::copysign(a.x(), r(0, 1));
      a.z() = std::copysign(a.z(), r(1, 2));
    } else {
      a.x() = std::copysign(a.x(), r(0, 2));
      a.y() = std::copysign(a.y(), r(1, 2));
    }
    return angle * a.normalized();
  }
  return (0.5 * angle / std::sin(angle)) * axis;
}

inline Mat3 so3_exp(const Vec3& w) {
  const double angle = w.norm();
  if (angle < 1e-12) return Mat3::Identity() + skew(w);
  const Vec3 axis = w / angle;
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

// Motion transport of mixed velocities (v, w) from a frame at `from` to a
// frame at `to`, both in world coordinates: v_to = v_from + w x (to - from).
inline Mat6 transport_motion(const Vec3& from, const Vec3& to) {
  Mat6 x = Mat6::Identity();
  x.block<3, 3>(0, 3) = -skew(to - from);
  return x;
}

// Spatial inertia of one body in world-origin Plucker coordinates, acting on
// (v_O, w) and producing (linear momentum, angular momentum about O).
// c = world CoM position, iw = rotational inertia about the CoM, world axes.
inline Mat6 spatial_inertia_at_origin(double mass, const Vec3& c, const Mat3& iw) {
  Mat6 io;
  const Mat3 sc = skew(c);
  io.block<3, 3>(0, 0) = mass * Mat3::Identity();
  io.block<3, 3>(0, 3) = -mass * sc;
  io.block<3, 3>(3, 0) = mass * sc;
  io.block<3, 3>(3, 3) = iw - mass * sc * sc;
  return io;
}

// Spatial cross products for world-origin Plucker coordinates, (linear, angular)
// component order.
inline Vec6 cross_motion(const Vec6& v, const Vec6& m) {
  Vec6 out;
  const Vec3 vl = v.head<3>(), w = v.tail<3>();
  const Vec3 ml = m.head<3>(), mw = m.tail<3>();
  out.head<3>() = w.cross(ml) + vl.cross(mw);
  out.tail<3>() = w.cross(mw);
  return out;
}

inline Vec6 cross_force(const Vec6& v, const Vec6& f) {
  Vec6 out;
  const Vec3 vl = v.head<3>(), w = v.tail<3>();
  const Vec3 fl = f.head<3>(), fn = f.tail<3>();
  out.head<3>() = w.cross(fl);
  out.tail<3>() = w.cross(fn) + vl.cross(fl);
  return out;
}

// Rz(yaw) * Ry(pitch) * Rx(roll).
inline Mat3 rpy_to_matrix(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) *
          Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

// SVD pseudoinverse with relative singular-value cutoff.
MatX pseudo_inverse(const MatX& m, double rel_tol = 1e-8, int* rank_out = nullptr);

}  // namespace seabal

#endif  // SEABAL_SPATIAL_HPP_
