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

#ifndef SEABAL_CONTROLLER_HPP_
#define SEABAL_CONTROLLER_HPP_

#include <optional>

#include "seabal/centroidal.hpp"
#include "seabal/qp.hpp"
#include "seabal/sea.hpp"

namespace seabal {

struct ControllerGains {
  Mat6 momentum_p = Mat6::Zero();  // on the momentum error
  Mat6 momentum_i = Mat6::Zero();  // on its integral
  MatX postural_p;                 // n x n, joint-space stiffness
  MatX postural_d;                 // n x n, joint-space damping
  VecX motor_gain;                 // per-motor velocity-loop gain, 1/s
};

// Reference trajectories: a CoM sinusoid about the initial CoM plus optional
// steps (CoM and posture) at step_time.  The momentum reference is
// (m * com velocity, desired angular momentum), angular part constant.
struct References {
  Vec3 com0 = Vec3::Zero();
  Vec3 com_amplitude = Vec3::Zero();   // m
  double com_frequency = 0.0;          // Hz
  Vec3 com_step = Vec3::Zero();        // m, added for t >= step_time
  double step_time = 0.0;              // s
  VecX s_nominal;                      // rad
  VecX s_step;                         // rad, added for t >= step_time
  Vec3 angular_momentum_d = Vec3::Zero();

  Vec3 com_ref(double t) const;
  Vec3 com_vel_ref(double t) const;
  Vec3 com_acc_ref(double t) const;
  VecX posture_ref(double t) const;
  Vec6 momentum_ref(double mass, double t) const;
  Vec6 momentum_rate_ref(double mass, double t) const;
};

struct ControllerState {
  Vec6 integral = Vec6::Zero();  // integral of the momentum-error integrand
  bool integral_frozen = false;  // true while the contact Jacobian is rank-deficient
};

// Output of one cascade evaluation.  For the elastic cascade, tau holds the
// fictitious input beta instead of a joint torque.
struct ForceTorqueSolution {
  Vec6 momentum_rate_des = Vec6::Zero();
  VecX f;           // chosen contact wrench stack
  VecX f1;          // particular momentum-achieving wrench
  MatX null_basis;  // orthonormal columns spanning null(J_b^T)
  VecX tau;
  VecX tau0;
  MatX lambda;      // J_j M_j^-1
  MatX null_lambda; // projector onto null(lambda)
  QpStatus qp_status = QpStatus::Solved;
  bool infeasible_hold = false;
};

// --- cascade pieces, exposed for direct testing ---

Vec6 momentum_reference(const Vec6& H, const Vec6& H_d, const Vec6& H_dot_d,
                        const Vec6& integral, const ControllerGains& gains);

// Momentum-error integral, in closed form so it jumps consistently with
// reference steps: the linear rows are m (CoM - CoM_ref) and the angular rows
// are the desired-posture momentum map applied to (s - s_ref).  The angular
// rows freeze (integral_frozen) while that map is rank-deficient.
void update_integral(ControllerState* cs, const RobotModel& model,
                     const SimState& state, const CentroidalQuantities& cq,
                     const References& refs, double t);

VecX postural_accel_torque(const CentroidalQuantities& cq, const MatX& null_lambda,
                           const VecX& s, const VecX& s_dot, const VecX& s_des,
                           const ControllerGains& gains);

// Full cascade: momentum reference -> force distribution (QP over the
// null-space redundancy, constraints C f <= b) -> postural torque -> torque
// reconstruction.  h_j_override, when set, replaces the joint bias rows
// (elastic cascade); previous_f seeds the QP warm start / infeasibility hold.
ForceTorqueSolution solve_cascade(const CentroidalQuantities& cq,
                                  const SimState& state, const References& refs,
                                  const ControllerState& cs,
                                  const ControllerGains& gains, const MatX& C,
                                  const VecX& b, double t, QpSolver* qp,
                                  const std::optional<VecX>& h_j_override,
                                  const VecX* injected_f0 = nullptr);

// --- elastic-specific pieces ---

// p = K_S(Gamma theta - s) - K_D s_dot on elastic rows (zero on rigid rows)
// and the modified joint bias h_j - p.
void elastic_bias(const CentroidalQuantities& cq, const SimState& state,
                  const SeaParams& params, const ActuationSpec& spec, VecX* p,
                  VecX* h_j_bar);

// theta_dot_d = Gamma^-1 K_D^-1 beta on elastic rows (elastic sub-vector out).
VecX desired_motor_velocity(const VecX& beta, const SeaParams& params,
                            const ActuationSpec& spec);

// tau_m = -I_m K_m (theta_dot - theta_dot_d) + Gamma tau_est, clamped to
// +-tau_m_max.  tau_est is the controller's coupling-torque estimate.
VecX motor_torque_command(const VecX& theta_dot, const VecX& theta_dot_d,
                          const VecX& tau_est, const SeaParams& params,
                          const ActuationSpec& spec, const ControllerGains& gains);

// --- plant-facing command + controller objects ---

struct ControlCommand {
  VecX joint_torque;   // link-side torque, applied on rigid rows
  VecX motor_torque;   // motor-side torque, applied on elastic rows
  VecX theta_dot_d;    // elastic rows; consumed by the ideal-velocity plant mode
  bool hold = false;   // cascade infeasible this cycle, command is a repeat
};

class ControllerBase {
 public:
  virtual ~ControllerBase() = default;
  virtual ControlCommand update(const RobotModel& model, const SimState& state,
                                double t, double dt) = 0;
  virtual void reset() {}
};

// Momentum controller assuming rigid transmissions: commands link torques.
class RigidBalanceController : public ControllerBase {
 public:
  RigidBalanceController(ControllerGains gains, References refs,
                         ContactConstraintSpec constraints);
  ControlCommand update(const RobotModel& model, const SimState& state, double t,
                        double dt) override;
  void reset() override;

  const ForceTorqueSolution& last_solution() const { return last_; }
  const ControllerState& controller_state() const { return cs_; }
  // Test hook: constant extra wrench added inside null(J_b^T) before torque
  // reconstruction (exercises the redundancy-invariance property).
  void inject_null_wrench(const VecX& f0) { injected_f0_ = f0; }
  // Extra diagonal joint-space inertia the controller models on top of the
  // link inertias, e.g. the reflected rotor inertia of rigidly geared motors.
  void set_reflected_inertia(const VecX& r) { reflected_inertia_ = r; }

 private:
  ControllerGains gains_;
  References refs_;
  ContactConstraintSpec constraints_;
  ControllerState cs_;
  QpSolver qp_;
  ForceTorqueSolution last_;
  VecX injected_f0_;
  VecX prev_torque_;
  VecX reflected_inertia_;
};

// Backstepping controller for (possibly mixed) series-elastic actuation:
// solves the cascade for the fictitious input, converts the elastic rows to
// desired motor velocities and a high-gain motor torque, passes rigid rows
// through as link torques.  Carries its own (possibly mismatched) estimates
// of the actuator constants.
class ElasticBalanceController : public ControllerBase {
 public:
  ElasticBalanceController(ControllerGains gains, References refs,
                           ContactConstraintSpec constraints, SeaParams estimates,
                           ActuationSpec spec);
  ControlCommand update(const RobotModel& model, const SimState& state, double t,
                        double dt) override;
  void reset() override;

  const ForceTorqueSolution& last_solution() const { return last_; }
  const VecX& last_theta_dot_d() const { return last_theta_dot_d_; }
  void inject_null_wrench(const VecX& f0) { injected_f0_ = f0; }

 private:
  ControllerGains gains_;
  References refs_;
  ContactConstraintSpec constraints_;
  SeaParams est_;
  ActuationSpec spec_;
  ControllerState cs_;
  QpSolver qp_;
  ForceTorqueSolution last_;
  VecX last_theta_dot_d_;
  VecX injected_f0_;
  VecX prev_joint_torque_, prev_motor_torque_;
};

// Applies a rigid-transmission controller to an elastic plant: the commanded
// link torque tau is sent to the motors as tau_m = Gamma tau (the rigid-limit
// input map); direct_joint_injection instead applies tau at the joints,
// bypassing the motor dynamics.
class RigidOnElasticController : public ControllerBase {
 public:
  RigidOnElasticController(RigidBalanceController inner, SeaParams plant,
                           ActuationSpec spec, bool direct_joint_injection = false);
  ControlCommand update(const RobotModel& model, const SimState& state, double t,
                        double dt) override;
  void reset() override;

 private:
  RigidBalanceController inner_;
  SeaParams plant_;
  ActuationSpec spec_;
  bool direct_;
};

}  // namespace seabal

#endif  // SEABAL_CONTROLLER_HPP_
