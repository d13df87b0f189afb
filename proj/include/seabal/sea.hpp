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

#ifndef SEABAL_SEA_HPP_
#define SEABAL_SEA_HPP_

#include <limits>
#include <vector>

#include "seabal/types.hpp"

namespace seabal {

enum class Actuation { Rigid, Elastic };

// Which joints are driven through a series spring.  Keeps the (s_rigid,
// s_elastic) partition bookkeeping in one place; all vectors elsewhere stay
// in plain joint order and are masked through this.
struct ActuationSpec {
  std::vector<Actuation> joints;

  int size() const { return static_cast<int>(joints.size()); }
  int elastic_count() const;
  bool all_rigid() const;
  bool all_elastic() const;
  static ActuationSpec uniform(int n, Actuation a);

  // Gather/scatter between full joint vectors and the elastic sub-vector.
  VecX elastic_part(const VecX& full) const;
  VecX expand_elastic(const VecX& elastic, double fill = 0.0) const;
};

// Per-joint actuator constants, stored as full-length diagonals; entries on
// rigid rows are ignored.  Transmission ratio is link angle per motor angle
// (e.g. 0.01 for a 100:1 reduction), so link-side position is gear_ratio *
// theta and motor torque tau_m reflects to the link as tau_m / gear_ratio.
struct SeaParams {
  VecX stiffness;      // N m / rad, link side
  VecX damping;        // N m s / rad, link side
  VecX gear_ratio;     // dimensionless, < 1 for reductions
  VecX motor_inertia;  // kg m^2, motor side
  VecX tau_m_max;      // N m, motor side; +inf = unsaturated

  static SeaParams uniform(int n, double ks, double kd, double gamma, double im,
                           double tau_max = std::numeric_limits<double>::infinity());
};

// Joint-side torque transmitted by the spring-damper:
//   tau = K_S (Gamma theta - s) + K_D (Gamma theta_dot - s_dot)
// computed on the elastic partition (inputs are elastic sub-vectors).
VecX coupling_torque(const VecX& theta, const VecX& theta_dot, const VecX& s,
                     const VecX& s_dot, const SeaParams& params,
                     const ActuationSpec& spec);

// Motor-side dynamics: theta_dd = I_m^-1 (tau_m - Gamma tau).
VecX motor_acceleration(const VecX& tau_m, const VecX& tau, const SeaParams& params,
                        const ActuationSpec& spec);

// Equivalent rigid model obtained as K_S -> inf: joint-space mass matrix
// gains the reflected inertia Gamma^-1 I_m Gamma^-1 and the input becomes
// Gamma^-1 tau_m.  Returned as the extra diagonal plus the input scaling so
// the caller can apply them to any dynamics evaluation.
struct RigidLimitModel {
  VecX reflected_inertia;  // added to the joint-space mass matrix diagonal
  VecX input_scale;        // tau = input_scale .* tau_m
};

RigidLimitModel rigid_limit_model(const SeaParams& params, const ActuationSpec& spec);

}  // namespace seabal

#endif  // SEABAL_SEA_HPP_
