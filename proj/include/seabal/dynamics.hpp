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

#ifndef SEABAL_DYNAMICS_HPP_
#define SEABAL_DYNAMICS_HPP_

#include "seabal/kinematics.hpp"
#include "seabal/model.hpp"
#include "seabal/state.hpp"

namespace seabal {

// M nud + h = B tau + J^T f, with nu = (base twist, sd) and h collecting
// Coriolis, centrifugal and gravity terms.
struct DynamicsQuantities {
  MatX mass_matrix;   // (6+n) x (6+n), symmetric positive definite
  VecX bias;          // h(q, nu)
  MatX selection;     // B, (6+n) x n: zero on the base rows
  MatX contact_jac;       // stacked, 6*n_c x (6+n)
  VecX contact_jac_dot_nu;
  KinematicsCache kin;
};

DynamicsQuantities compute_dynamics(const RobotModel& model, const SimState& state);

// Total kinetic energy (used by tests as an independent check on M).
double kinetic_energy(const DynamicsQuantities& dyn, const VecX& nu);

// Spatial momentum about the world origin.
Vec6 spatial_momentum(const DynamicsQuantities& dyn, const VecX& nu);

struct ContactReference {
  // Pose each contact frame is servoed to by the constraint stabilization;
  // captured from the state at simulation start.
  std::vector<Vec3> pos;
  std::vector<Mat3> rot;
};

ContactReference capture_contact_reference(const RobotModel& model,
                                           const KinematicsCache& kin);

struct ForwardDynamicsResult {
  VecX nu_dot;          // (6+n)
  VecX contact_forces;  // stacked (force, torque) per contact, world frame
};

// Constrained accelerations from the KKT system
//   [ M  -J^T ] [nud]   [ B tau - h                          ]
//   [ J   0   ] [ f ] = [ -Jd nu - kd J nu - kp e_contact    ]
// where e_contact is the pose error of each contact frame w.r.t. its
// reference (position difference, rotation log).  kp/kd keep the closed
// constraint from drifting under integration error.  Throws ModelError if the
// KKT matrix is singular (contact rows dependent to working precision).
ForwardDynamicsResult constrained_forward_dynamics(
    const RobotModel& model, const DynamicsQuantities& dyn,
    const ContactReference& ref, const VecX& nu, const VecX& tau,
    double stab_kp = 100.0, double stab_kd = 20.0);

}  // namespace seabal

#endif  // SEABAL_DYNAMICS_HPP_
