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

#include "seabal/controller.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <utility>

#include "seabal/spatial.hpp"

namespace seabal {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Orthonormal null-space basis of a (possibly wide) matrix.
MatX null_basis_of(const MatX& a) {
  Eigen::JacobiSVD<MatX> svd(a, Eigen::ComputeFullV);
  const VecX& s = svd.singularValues();
  const double cut = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++rank;
  return svd.matrixV().rightCols(a.cols() - rank);
}

Vec6 weight_vector(const CentroidalQuantities& cq) {
  Vec6 w = Vec6::Zero();
  w(2) = cq.mass * cq.gravity;
  return w;
}

}  // namespace

Vec3 References::com_ref(double t) const {
  Vec3 r = com0 + com_amplitude * std::sin(kTwoPi * com_frequency * t);
  if (t >= step_time) r += com_step;
  return r;
}

Vec3 References::com_vel_ref(double t) const {
  const double w = kTwoPi * com_frequency;
  return com_amplitude * (w * std::cos(w * t));
}

Vec3 References::com_acc_ref(double t) const {
  const double w = kTwoPi * com_frequency;
  return com_amplitude * (-w * w * std::sin(w * t));
}

VecX References::posture_ref(double t) const {
  if (t >= step_time && s_step.size()) return s_nominal + s_step;
  return s_nominal;
}

Vec6 References::momentum_ref(double mass, double t) const {
  Vec6 h;
  h.head<3>() = mass * com_vel_ref(t);
  h.tail<3>() = angular_momentum_d;
  return h;
}

Vec6 References::momentum_rate_ref(double mass, double t) const {
  Vec6 h = Vec6::Zero();
  h.head<3>() = mass * com_acc_ref(t);
  return h;
}

Vec6 momentum_reference(const Vec6& H, const Vec6& H_d, const Vec6& H_dot_d,
                        const Vec6& integral, const ControllerGains& gains) {
  return H_dot_d - gains.momentum_p * (H - H_d) - gains.momentum_i * integral;
}

void update_integral(ControllerState* cs, const RobotModel& model,
                     const SimState& state, const CentroidalQuantities& cq,
                     const References& refs, double t) {
  cs->integral.head<3>() = cq.mass * (cq.p_c - refs.com_ref(t));
  bool bad = false;
  const VecX s_des = refs.posture_ref(t);
  const MatX jg = jg_bar_at(model, state, s_des, &bad);
  cs->integral_frozen = bad;
  if (!bad) cs->integral.tail<3>() = (jg * (state.s - s_des)).tail<3>();
}

VecX postural_accel_torque(const CentroidalQuantities& cq, const MatX& null_lambda,
                           const VecX& s, const VecX& s_dot, const VecX& s_des,
                           const ControllerGains& gains) {
  const MatX nm = null_lambda * cq.M_j;
  return -gains.postural_p * (nm * (s - s_des)) - gains.postural_d * (nm * s_dot);
}

ForceTorqueSolution solve_cascade(const CentroidalQuantities& cq,
                                  const SimState& state, const References& refs,
                                  const ControllerState& cs,
                                  const ControllerGains& gains, const MatX& C,
                                  const VecX& b, double t, QpSolver* qp,
                                  const std::optional<VecX>& h_j_override,
                                  const VecX* injected_f0) {
  const int n = static_cast<int>(cq.M_j.rows());
  const int fdim = static_cast<int>(cq.J_b.rows());
  ForceTorqueSolution sol;

  const Vec6 h_d = refs.momentum_ref(cq.mass, t);
  const Vec6 h_dot_d = refs.momentum_rate_ref(cq.mass, t);
  sol.momentum_rate_des =
      momentum_reference(cq.H, h_d, h_dot_d, cs.integral, gains);

  const VecX h_j = h_j_override ? *h_j_override : cq.h_j;

  // Momentum-achieving particular wrench and the redundancy basis.
  const MatX a_mom = cq.J_b.transpose();  // 6 x fdim
  const MatX a_mom_pinv = pseudo_inverse(a_mom);
  sol.f1 = a_mom_pinv * (sol.momentum_rate_des + weight_vector(cq));
  sol.null_basis = null_basis_of(a_mom);

  // Torque as an affine function of the wrench.  lambda maps torque to the
  // part of the contact acceleration it can influence.
  MatX m_j_inv_jt =
      cq.M_j.ldlt().solve(cq.J_j.transpose());  // n x fdim
  sol.lambda = m_j_inv_jt.transpose();          // J_j M_j^-1
  const MatX lambda_pinv = pseudo_inverse(sol.lambda);
  sol.null_lambda = MatX::Identity(n, n) - lambda_pinv * sol.lambda;

  // J M^-1 J^T and J M^-1 h over the block-diagonal transformed dynamics.
  const Mat6 m_b_inv = cq.M_b.ldlt().solve(Mat6::Identity());
  const MatX j_m_inv_jt = cq.J_b * m_b_inv * cq.J_b.transpose() +
                          cq.J_j * m_j_inv_jt;
  const VecX j_m_inv_h =
      cq.J_b * (m_b_inv * cq.h_b) + cq.J_j * cq.M_j.ldlt().solve(h_j);

  const VecX u0 = postural_accel_torque(cq, sol.null_lambda, state.s,
                                        state.s_dot, refs.posture_ref(t), gains);
  const MatX a_tau = -lambda_pinv * j_m_inv_jt -
                     sol.null_lambda * cq.J_j.transpose();
  const VecX c_tau = lambda_pinv * (j_m_inv_h - cq.J_dot_nu) +
                     sol.null_lambda * (h_j + u0);
  sol.tau0 = u0;  // filled with the full tau0 once f is known

  VecX f = sol.f1;
  if (sol.null_basis.cols() == 0) {
    // No redundancy: feasibility check only.
    if (C.rows() &&
        (C * f - b).maxCoeff() > 1e-7 * std::max(1.0, b.cwiseAbs().maxCoeff()))
      sol.infeasible_hold = true;
  } else {
    QpProblem prob;
    prob.W = a_tau * sol.null_basis;
    prob.w = -(a_tau * sol.f1 + c_tau);
    prob.A_eq = MatX::Zero(0, sol.null_basis.cols());
    prob.b_eq = VecX::Zero(0);
    if (C.rows()) {
      prob.C = C * sol.null_basis;
      prob.b = b - C * sol.f1;
    } else {
      prob.C = MatX::Zero(0, sol.null_basis.cols());
      prob.b = VecX::Zero(0);
    }
    const QpSolution qs = qp->solve(prob);
    sol.qp_status = qs.status;
    if (qs.status == QpStatus::Infeasible) {
      sol.infeasible_hold = true;
    } else {
      f += sol.null_basis * qs.x;
    }
  }

  if (injected_f0 && injected_f0->size() == fdim) {
    // Test hook: push the extra wrench through the exact null projector so
    // the momentum equation stays satisfied.
    const MatX p_null =
        MatX::Identity(fdim, fdim) - a_mom_pinv * a_mom;
    f += p_null * (*injected_f0);
  }

  sol.f = f;
  sol.tau = a_tau * f + c_tau;
  sol.tau0 = h_j - cq.J_j.transpose() * f + u0;
  return sol;
}

void elastic_bias(const CentroidalQuantities& cq, const SimState& state,
                  const SeaParams& params, const ActuationSpec& spec, VecX* p,
                  VecX* h_j_bar) {
  const VecX ks = spec.elastic_part(params.stiffness);
  const VecX kd = spec.elastic_part(params.damping);
  const VecX g = spec.elastic_part(params.gear_ratio);
  const VecX theta = spec.elastic_part(state.theta);
  const VecX s = spec.elastic_part(state.s);
  const VecX s_dot = spec.elastic_part(state.s_dot);
  const VecX p_el = ks.cwiseProduct(g.cwiseProduct(theta) - s) -
                    kd.cwiseProduct(s_dot);
  *p = spec.expand_elastic(p_el, 0.0);
  *h_j_bar = cq.h_j - *p;
}

VecX desired_motor_velocity(const VecX& beta, const SeaParams& params,
                            const ActuationSpec& spec) {
  const VecX g = spec.elastic_part(params.gear_ratio);
  const VecX kd = spec.elastic_part(params.damping);
  return spec.elastic_part(beta).cwiseQuotient(g.cwiseProduct(kd));
}

VecX motor_torque_command(const VecX& theta_dot, const VecX& theta_dot_d,
                          const VecX& tau_est, const SeaParams& params,
                          const ActuationSpec& spec, const ControllerGains& gains) {
  const VecX im = spec.elastic_part(params.motor_inertia);
  const VecX g = spec.elastic_part(params.gear_ratio);
  const VecX km = spec.elastic_part(gains.motor_gain);
  const VecX cap = spec.elastic_part(params.tau_m_max);
  VecX tau_m = -im.cwiseProduct(km.cwiseProduct(theta_dot - theta_dot_d)) +
               g.cwiseProduct(tau_est);
  return tau_m.cwiseMax(-cap).cwiseMin(cap);
}

// --- rigid controller ---

RigidBalanceController::RigidBalanceController(ControllerGains gains,
                                               References refs,
                                               ContactConstraintSpec constraints)
    : gains_(std::move(gains)),
      refs_(std::move(refs)),
      constraints_(constraints) {}

void RigidBalanceController::reset() {
  cs_ = ControllerState();
  qp_ = QpSolver();
  last_ = ForceTorqueSolution();
  prev_torque_ = VecX();
}

ControlCommand RigidBalanceController::update(const RobotModel& model,
                                              const SimState& state, double t,
                                              double dt) {
  DynamicsQuantities dyn = compute_dynamics(model, state);
  if (reflected_inertia_.size()) {
    const int nj = static_cast<int>(reflected_inertia_.size());
    dyn.mass_matrix.bottomRightCorner(nj, nj).diagonal() += reflected_inertia_;
  }
  const CentroidalQuantities cq = centroidal_transform(model, state, dyn);
  update_integral(&cs_, model, state, cq, refs_, t);

  std::vector<Mat3> rots;
  for (const ContactKin& c : dyn.kin.contacts) rots.push_back(c.rot);
  MatX c_mat;
  VecX b_vec;
  build_stacked_contact_constraints(constraints_, rots, &c_mat, &b_vec);

  last_ = solve_cascade(cq, state, refs_, cs_, gains_, c_mat, b_vec, t, &qp_,
                        std::nullopt,
                        injected_f0_.size() ? &injected_f0_ : nullptr);

  ControlCommand cmd;
  cmd.theta_dot_d = VecX();
  cmd.motor_torque = VecX();
  if (last_.infeasible_hold && prev_torque_.size()) {
    cmd.joint_torque = prev_torque_;
    cmd.hold = true;
  } else {
    cmd.joint_torque = last_.tau;
    prev_torque_ = last_.tau;
  }
  return cmd;
}

// --- elastic controller ---

ElasticBalanceController::ElasticBalanceController(ControllerGains gains,
                                                   References refs,
                                                   ContactConstraintSpec constraints,
                                                   SeaParams estimates,
                                                   ActuationSpec spec)
    : gains_(std::move(gains)),
      refs_(std::move(refs)),
      constraints_(constraints),
      est_(std::move(estimates)),
      spec_(std::move(spec)) {}

void ElasticBalanceController::reset() {
  cs_ = ControllerState();
  qp_ = QpSolver();
  last_ = ForceTorqueSolution();
  last_theta_dot_d_ = VecX();
  prev_joint_torque_ = VecX();
  prev_motor_torque_ = VecX();
}

ControlCommand ElasticBalanceController::update(const RobotModel& model,
                                                const SimState& state, double t,
                                                double dt) {
  const DynamicsQuantities dyn = compute_dynamics(model, state);
  const CentroidalQuantities cq = centroidal_transform(model, state, dyn);
  update_integral(&cs_, model, state, cq, refs_, t);

  std::vector<Mat3> rots;
  for (const ContactKin& c : dyn.kin.contacts) rots.push_back(c.rot);
  MatX c_mat;
  VecX b_vec;
  build_stacked_contact_constraints(constraints_, rots, &c_mat, &b_vec);

  // Substitute the transmission state into the joint bias so the cascade
  // solves for the fictitious input on elastic rows and the torque on rigid
  // ones.
  VecX p, h_j_bar;
  elastic_bias(cq, state, est_, spec_, &p, &h_j_bar);
  last_ = solve_cascade(cq, state, refs_, cs_, gains_, c_mat, b_vec, t, &qp_,
                        h_j_bar, injected_f0_.size() ? &injected_f0_ : nullptr);

  const VecX beta = last_.tau;
  last_theta_dot_d_ = desired_motor_velocity(beta, est_, spec_);
  const VecX tau_est = coupling_torque(
      spec_.elastic_part(state.theta), spec_.elastic_part(state.theta_dot),
      spec_.elastic_part(state.s), spec_.elastic_part(state.s_dot), est_, spec_);
  const VecX tau_m =
      motor_torque_command(spec_.elastic_part(state.theta_dot),
                           last_theta_dot_d_, tau_est, est_, spec_, gains_);

  ControlCommand cmd;
  if (last_.infeasible_hold && prev_motor_torque_.size()) {
    cmd.joint_torque = prev_joint_torque_;
    cmd.motor_torque = prev_motor_torque_;
    cmd.hold = true;
  } else {
    // Elastic rows are driven through the motors; keep only rigid rows on
    // the link side.
    VecX joint_torque = beta;
    for (int i = 0; i < spec_.size(); ++i)
      if (spec_.joints[i] == Actuation::Elastic) joint_torque(i) = 0.0;
    cmd.joint_torque = joint_torque;
    cmd.motor_torque = tau_m;
    prev_joint_torque_ = joint_torque;
    prev_motor_torque_ = tau_m;
  }
  cmd.theta_dot_d = last_theta_dot_d_;
  return cmd;
}

// --- rigid controller driving an elastic plant ---

RigidOnElasticController::RigidOnElasticController(RigidBalanceController inner,
                                                   SeaParams plant,
                                                   ActuationSpec spec,
                                                   bool direct_joint_injection)
    : inner_(std::move(inner)),
      plant_(std::move(plant)),
      spec_(std::move(spec)),
      direct_(direct_joint_injection) {}

void RigidOnElasticController::reset() { inner_.reset(); }

ControlCommand RigidOnElasticController::update(const RobotModel& model,
                                                const SimState& state, double t,
                                                double dt) {
  ControlCommand cmd = inner_.update(model, state, t, dt);
  if (direct_) return cmd;  // link-side injection, motors left alone
  // Reflect the commanded link torque to the motor side; elastic rows get no
  // direct link torque.
  const VecX g = spec_.elastic_part(plant_.gear_ratio);
  const VecX cap = spec_.elastic_part(plant_.tau_m_max);
  VecX tau_m = g.cwiseProduct(spec_.elastic_part(cmd.joint_torque));
  tau_m = tau_m.cwiseMax(-cap).cwiseMin(cap);
  for (int i = 0; i < spec_.size(); ++i)
    if (spec_.joints[i] == Actuation::Elastic) cmd.joint_torque(i) = 0.0;
  cmd.motor_torque = tau_m;
  cmd.theta_dot_d = VecX();
  return cmd;
}

}  // namespace seabal
