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

#ifndef SEABAL_STATE_HPP_
#define SEABAL_STATE_HPP_

#include "seabal/types.hpp"

namespace seabal {

struct BasePose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();  // world_R_base
};

// Full simulator state.  The quaternion is integrated without renormalization
// (a Lie-term in its derivative pulls |q| back to 1), so orientation here may
// carry a small norm error; use normalized() wherever a rotation is needed.
//
// theta / theta_dot are motor-side positions after the gearbox divided out is
// NOT applied here: theta is the motor coordinate, link-side equivalent is
// gear_ratio^-1 * theta.  Rigid joints simply mirror s into theta so the state
// layout is uniform across actuation types.
struct SimState {
  BasePose base;
  VecX s;          // joint positions, rad
  VecX theta;      // motor positions, rad
  Vec3 base_lin_vel = Vec3::Zero();  // d/dt position (world)
  Vec3 base_ang_vel = Vec3::Zero();  // world angular velocity
  VecX s_dot;
  VecX theta_dot;

  int joint_count() const { return static_cast<int>(s.size()); }

  // Generalized velocity (base then joints), base part in the mixed
  // (linear velocity of the base point, world angular velocity) convention.
  VecX generalized_velocity() const;

  // Flat vector used by the integrators:
  // [p(3) q(4: w x y z) s(n) theta(n) pd(3) w(3) sd(n) thetad(n)].
  VecX pack() const;
  static SimState unpack(const VecX& x, int joint_count);
  static int packed_size(int joint_count) { return 13 + 4 * joint_count; }
};

SimState make_state(int joint_count);

}  // namespace seabal

#endif  // SEABAL_STATE_HPP_
