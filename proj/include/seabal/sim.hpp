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

#ifndef SEABAL_SIM_HPP_
#define SEABAL_SIM_HPP_

#include <string>
#include <vector>

#include "seabal/controller.hpp"
#include "seabal/dynamics.hpp"
#include "seabal/sea.hpp"

namespace seabal {

// A robot plus its actuation: rigid rows take the command's joint torque
// directly; elastic rows take motor torque through the motor + spring
// dynamics.  reflected_inertia (when non-empty) is added to the joint-space
// mass matrix diagonal -- the equivalent rigid model of a geared drive.
struct Plant {
  RobotModel model;
  ActuationSpec actuation;
  SeaParams sea;       // plant-side truth; unused rows ignored
  VecX reflected_inertia;
};

Plant make_rigid_plant(RobotModel model);
Plant make_elastic_plant(RobotModel model, SeaParams sea);

struct SimConfig {
  enum class Method { FixedRK4, AdaptiveRK45 };
  Method method = Method::FixedRK4;
  double dt = 2e-4;              // fixed-step size
  double abs_tol = 1e-8;         // adaptive controller tolerances
  double rel_tol = 1e-6;
  double quat_gain = 10.0;       // pulls |Q| back to 1, 1/s
  double stab_kp = 100.0;        // contact stabilization, 1/s^2
  double stab_kd = 20.0;         // 1/s
  double horizon = 5.0;          // s
  double control_period = 1e-3;  // zero-order hold interval
  double output_period = 1e-2;
  bool ideal_velocity = false;   // elastic rows track theta_dot_d exactly
  double guard_velocity = 1e4;   // divergence guard on |velocity|_inf
  double guard_position = 1e3;   // and on |s|_inf, rad
};

// Time derivative of the packed state under a held command; the quaternion
// derivative carries the norm-restoring term quat_gain*(1-|Q|^2)Q on top of
// the kinematic map.
VecX state_derivative(const Plant& plant, const SimState& state,
                      const ControlCommand& cmd, const ContactReference& ref,
                      const SimConfig& config, VecX* contact_forces = nullptr);

struct TrajectorySample {
  double t = 0.0;
  SimState state;
  ControlCommand command;
  VecX contact_forces;
  Vec6 momentum = Vec6::Zero();
  Vec3 com = Vec3::Zero();
  double quat_norm_error = 0.0;
  double contact_drift = 0.0;  // worst contact pose error, m + rad
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  bool diverged = false;
  double diverged_time = 0.0;
  std::string note;            // why the run ended early, if it did
  long long derivative_evals = 0;
};

// Integrates the closed loop: controller evaluated every control_period on
// the current state (zero-order hold), integrator substeps in between,
// samples recorded every output_period.  Contact reference poses are captured
// from the initial state.  Divergence trips the guard and ends the run early
// with diverged set; it is an outcome, not an error.
Trajectory run_simulation(const Plant& plant, ControllerBase* controller,
                          const SimState& initial, const SimConfig& config);

// Joint torques balancing gravity at the given state with zero acceleration,
// plus the matching contact wrench stack: the static solve used to start
// scenarios at equilibrium.
void static_equilibrium(const RobotModel& model, const SimState& state,
                        VecX* tau, VecX* f);

// Motor positions that preload the springs to carry the given joint torque:
// theta = Gamma^-1 (s + K_S^-1 tau) on elastic rows.
VecX spring_preload_theta(const VecX& s, const VecX& tau, const SeaParams& sea,
                          const ActuationSpec& spec);

}  // namespace seabal

#endif  // SEABAL_SIM_HPP_
