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

#ifndef SEABAL_KINEMATICS_HPP_
#define SEABAL_KINEMATICS_HPP_

#include <vector>

#include "seabal/model.hpp"
#include "seabal/state.hpp"

namespace seabal {

// Everything downstream (mass matrix, bias, Jacobians, momentum) is computed
// in world-origin Plucker coordinates: a link's spatial velocity is
// (v_O, omega) where v_O is the velocity of the body-fixed point currently
// coincident with the world origin.  In these coordinates composite inertias
// sum without transforms.
struct LinkKin {
  Mat3 rot;          // world_R_link
  Vec3 pos;          // link frame origin, world
  Vec3 com;          // link CoM, world
  Mat3 inertia_w;    // rotational inertia about CoM, world axes
  Vec6 axis;         // joint motion subspace at O (zero for the base)
  Vec6 vel;          // spatial velocity at O
  Vec6 bias_acc;     // spatial acceleration at O when all qdd = 0
};

struct ContactKin {
  Mat3 rot;   // world_R_contact
  Vec3 pos;   // contact frame origin, world
};

struct KinematicsCache {
  std::vector<LinkKin> links;
  std::vector<ContactKin> contacts;
  Vec3 com = Vec3::Zero();       // whole-robot CoM
  Vec3 com_vel = Vec3::Zero();
};

// Forward pass over the tree.  Base spatial velocity at O is
// (pd_B + p_B x omega ... ) derived from the mixed base twist; its bias
// acceleration accounts for d/dt of that conversion.
KinematicsCache compute_kinematics(const RobotModel& model, const SimState& state);

// 6 x (6+n) contact Jacobian of one contact frame, rows (linear, angular),
// mapping the generalized velocity to the world-frame spatial velocity of the
// contact point (classical velocity of the material point, world angular
// velocity).
MatX contact_jacobian(const RobotModel& model, const KinematicsCache& kin,
                      int contact_index);

// d/dt(J) * nu for the same contact (acceleration the frame would have with
// frozen generalized accelerations).
Vec6 contact_jacobian_dot_nu(const RobotModel& model, const KinematicsCache& kin,
                             int contact_index);

// Stacked versions over all contact frames (6*n_c rows).
MatX stacked_contact_jacobian(const RobotModel& model, const KinematicsCache& kin);
VecX stacked_contact_jacobian_dot_nu(const RobotModel& model,
                                     const KinematicsCache& kin);

}  // namespace seabal

#endif  // SEABAL_KINEMATICS_HPP_
