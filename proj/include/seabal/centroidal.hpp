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

#ifndef SEABAL_CENTROIDAL_HPP_
#define SEABAL_CENTROIDAL_HPP_

#include "seabal/dynamics.hpp"

namespace seabal {

// Dynamics re-expressed in velocity coordinates nu_bar = (v_B, sd) with
// v_B = (CoM velocity, average angular velocity).  In these coordinates the
// mass matrix is block diagonal: M_b = diag(m I3, I_C) with I_C the locked
// inertia about the CoM, and the first six equations are the Newton-Euler
// equations of the whole robot at its CoM.
struct CentroidalQuantities {
  Mat6 M_b;
  MatX M_j;        // n x n, Schur complement of the base block
  Vec6 h_b;        // bias of the centroidal equations (gravity + inertial)
  VecX h_j;
  MatX J_b;        // 6 n_c x 6, contact Jacobian w.r.t. v_B
  MatX J_j;        // 6 n_c x n
  VecX J_dot_nu;   // transformed drift: contact acceleration at nu_bar_dot = 0
  Vec6 H;          // centroidal momentum (linear, angular), = M_b v_B
  Vec3 p_c;        // CoM position
  Vec6 v_B;
  VecX v_bar;      // full transformed velocity (v_B, sd)
  MatX T;          // nu_bar = T nu
  MatX T_inv;
  Mat3 locked_inertia;      // I_C
  Mat3 locked_inertia_dot;  // d/dt I_C at the current state
  double mass = 0.0;
  double gravity = 9.81;
};

CentroidalQuantities centroidal_transform(const RobotModel& model,
                                          const SimState& state,
                                          const DynamicsQuantities& dyn);

// Hd(f) = J_b^T f - m g e3 (e3 = third canonical 6-vector): momentum rate
// under contact wrenches f and gravity.
Vec6 momentum_rate_from_forces(const VecX& f, const CentroidalQuantities& cq);

// J_G_bar = -M_b J_b^dagger J_j: maps sd to H when the contact constraint
// eliminates the base velocity.  rank_deficient (optional) reports whether
// J_b lost column rank, in which case the caller should not trust the map.
MatX jg_bar(const CentroidalQuantities& cq, bool* rank_deficient = nullptr);

// jg_bar evaluated at joint positions s_eval (zero velocity, same base pose):
// used for the angular rows of the momentum-error integrand, which the
// control law evaluates at the desired posture rather than the current one.
MatX jg_bar_at(const RobotModel& model, const SimState& state, const VecX& s_eval,
               bool* rank_deficient = nullptr);

}  // namespace seabal

#endif  // SEABAL_CENTROIDAL_HPP_
