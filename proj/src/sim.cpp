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

#include "seabal/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "seabal/centroidal.hpp"
#include "seabal/spatial.hpp"

namespace seabal {
namespace {

bool finite(const VecX& x) { return x.allFinite(); }

// Quaternion kinematics: qd = 0.5 * (0, w_world) * q, plus the norm-restoring
// term.  Components ordered (w, x, y, z) to match SimState::pack.
Eigen::Vector4d quat_derivative(const Quat& q, const Vec3& w, double gain) {
  const Quat wq(0.0, w.x(), w.y(), w.z());
  const Quat qd = wq * q;
  const double n2 = q.squaredNorm();
  Eigen::Vector4d out;
  out(0) = 0.5 * qd.w() + gain * (1.0 - n2) * q.w();
  out(1) = 0.5 * qd.x() + gain * (1.0 - n2) * q.x();
  out(2) = 0.5 * qd.y() + gain * (1.0 - n2) * q.y();
  out(3) = 0.5 * qd.z() + gain * (1.0 - n2) * q.z();
  return out;
}

struct DerivativeContext {
  const Plant* plant = nullptr;
  const ControlCommand* cmd = nullptr;
  const ContactReference* ref = nullptr;
  const SimConfig* config = nullptr;
  long long evals = 0;

  VecX operator()(const VecX& packed) {
    ++evals;
    const int n = plant->model.joint_count();
    const SimState s = SimState::unpack(packed, n);
    return state_derivative(*plant, s, *cmd, *ref, *config);
  }
};

// Classic fourth-order step on the packed state.
VecX rk4_step(DerivativeContext* ctx, const VecX& y, double h) {
  const VecX k1 = (*ctx)(y);
  const VecX k2 = (*ctx)(y + 0.5 * h * k1);
  const VecX k3 = (*ctx)(y + 0.5 * h * k2);
  const VecX k4 = (*ctx)(y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Dormand-Prince 5(4) pair; returns the 5th-order solution and the embedded
// error estimate.
void dopri_step(DerivativeContext* ctx, const VecX& y, double h, VecX* y5,
                VecX* err) {
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  const VecX k1 = (*ctx)(y);
  const VecX k2 = (*ctx)(y + h * (a21 * k1));
  const VecX k3 = (*ctx)(y + h * (a31 * k1 + a32 * k2));
  const VecX k4 = (*ctx)(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const VecX k5 = (*ctx)(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const VecX k6 =
      (*ctx)(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  *y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const VecX k7 = (*ctx)(*y5);
  *err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
}

double error_norm(const VecX& err, const VecX& y0, const VecX& y1,
                  const SimConfig& config) {
  double worst = 0.0;
  for (int i = 0; i < err.size(); ++i) {
    const double scale =
        config.abs_tol +
        config.rel_tol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    worst = std::max(worst, std::abs(err(i)) / scale);
  }
  return worst;
}

// Integrates one zero-order-hold segment of length T in place.
void advance_segment(DerivativeContext* ctx, VecX* y, double segment,
                     double* h_adaptive) {
  const SimConfig& config = *ctx->config;
  if (config.method == SimConfig::Method::FixedRK4) {
    const int steps =
        std::max(1, static_cast<int>(std::lround(segment / config.dt)));
    const double h = segment / steps;
    for (int i = 0; i < steps; ++i) *y = rk4_step(ctx, *y, h);
    return;
  }
  double remaining = segment;
  double h = std::min(*h_adaptive > 0 ? *h_adaptive : config.dt, remaining);
  int attempts = 0;
  while (remaining > 1e-14) {
    h = std::min(h, remaining);
    VecX y5, err;
    dopri_step(ctx, *y, h, &y5, &err);
    if (!y5.allFinite()) {
      // Let the divergence guard see the blow-up instead of looping here.
      *y = y5;
      return;
    }
    double en = error_norm(err, *y, y5, config);
    if (!std::isfinite(en)) en = 1e12;
    const bool floored = h <= 1e-10 || ++attempts > 100000;
    if (en <= 1.0 || floored) {
      *y = y5;
      remaining -= h;
    }
    const double factor = en > 0.0 ? 0.9 * std::pow(en, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
    h = std::max(h, 1e-10);
  }
  *h_adaptive = h;
}

double worst_contact_drift(const KinematicsCache& kin,
                           const ContactReference& ref) {
  double worst = 0.0;
  for (size_t i = 0; i < kin.contacts.size() && i < ref.pos.size(); ++i) {
    const double lin = (kin.contacts[i].pos - ref.pos[i]).norm();
    const double ang =
        so3_log(Mat3(kin.contacts[i].rot * ref.rot[i].transpose())).norm();
    worst = std::max(worst, lin + ang);
  }
  return worst;
}

}  // namespace

Plant make_rigid_plant(RobotModel model) {
  Plant p;
  const int n = model.joint_count();
  p.model = std::move(model);
  p.actuation = ActuationSpec::uniform(n, Actuation::Rigid);
  p.sea = SeaParams::uniform(n, 0.0, 0.0, 1.0, 0.0);
  return p;
}

Plant make_elastic_plant(RobotModel model, SeaParams sea) {
  Plant p;
  const int n = model.joint_count();
  p.model = std::move(model);
  p.actuation = ActuationSpec::uniform(n, Actuation::Elastic);
  p.sea = std::move(sea);
  return p;
}

VecX state_derivative(const Plant& plant, const SimState& state,
                      const ControlCommand& cmd, const ContactReference& ref,
                      const SimConfig& config, VecX* contact_forces) {
  const int n = state.joint_count();
  SimState work = state;
  work.base.orientation.normalize();

  const bool has_elastic = plant.actuation.elastic_count() > 0;
  const bool ideal = config.ideal_velocity && has_elastic &&
                     cmd.theta_dot_d.size() == plant.actuation.elastic_count();
  if (ideal) {
    // Velocity-source motors: theta_dot is pinned to the commanded value for
    // every force computation this step.
    const VecX full = plant.actuation.expand_elastic(cmd.theta_dot_d, 0.0);
    for (int i = 0; i < n; ++i)
      if (plant.actuation.joints[i] == Actuation::Elastic)
        work.theta_dot(i) = full(i);
  }

  DynamicsQuantities dyn = compute_dynamics(plant.model, work);
  if (plant.reflected_inertia.size() == n)
    dyn.mass_matrix.bottomRightCorner(n, n).diagonal() +=
        plant.reflected_inertia;

  VecX tau = cmd.joint_torque.size() == n ? cmd.joint_torque : VecX::Zero(n);
  VecX tau_coupling_el;
  if (has_elastic) {
    tau_coupling_el = coupling_torque(
        plant.actuation.elastic_part(work.theta),
        plant.actuation.elastic_part(work.theta_dot),
        plant.actuation.elastic_part(work.s),
        plant.actuation.elastic_part(work.s_dot), plant.sea, plant.actuation);
    tau += plant.actuation.expand_elastic(tau_coupling_el, 0.0);
  }

  const VecX nu = work.generalized_velocity();
  const ForwardDynamicsResult fd = constrained_forward_dynamics(
      plant.model, dyn, ref, nu, tau, config.stab_kp, config.stab_kd);
  if (contact_forces) *contact_forces = fd.contact_forces;

  // Motor side.
  VecX theta_dot_deriv = work.s_dot;          // rigid rows mirror the joints
  VecX theta_ddot = fd.nu_dot.tail(n);        // rigid rows mirror as well
  if (has_elastic) {
    VecX theta_dd_el;
    if (ideal) {
      theta_dd_el = VecX::Zero(plant.actuation.elastic_count());
    } else {
      VecX tau_m = cmd.motor_torque.size() == plant.actuation.elastic_count()
                       ? cmd.motor_torque
                       : VecX::Zero(plant.actuation.elastic_count());
      const VecX cap = plant.actuation.elastic_part(plant.sea.tau_m_max);
      tau_m = tau_m.cwiseMax(-cap).cwiseMin(cap);
      theta_dd_el =
          motor_acceleration(tau_m, tau_coupling_el, plant.sea, plant.actuation);
    }
    int e = 0;
    for (int i = 0; i < n; ++i) {
      if (plant.actuation.joints[i] != Actuation::Elastic) continue;
      theta_dot_deriv(i) = work.theta_dot(i);
      theta_ddot(i) = theta_dd_el(e++);
    }
  }

  VecX out(SimState::packed_size(n));
  out.segment<3>(0) = work.base_lin_vel;
  out.segment<4>(3) = quat_derivative(state.base.orientation, work.base_ang_vel,
                                      config.quat_gain);
  out.segment(7, n) = work.s_dot;
  out.segment(7 + n, n) = theta_dot_deriv;
  out.segment<3>(7 + 2 * n) = fd.nu_dot.head<3>();
  out.segment<3>(10 + 2 * n) = fd.nu_dot.segment<3>(3);
  out.segment(13 + 2 * n, n) = fd.nu_dot.tail(n);
  out.segment(13 + 3 * n, n) = theta_ddot;
  return out;
}

Trajectory run_simulation(const Plant& plant, ControllerBase* controller,
                          const SimState& initial, const SimConfig& config) {
  Trajectory traj;
  const int n = initial.joint_count();
  const KinematicsCache kin0 = compute_kinematics(plant.model, initial);
  const ContactReference ref = capture_contact_reference(plant.model, kin0);

  const long long cycles = std::max<long long>(
      1, std::llround(config.horizon / config.control_period));
  const long long per_out = std::max<long long>(
      1, std::llround(config.output_period / config.control_period));

  VecX y = initial.pack();
  double h_adaptive = 0.0;
  ControlCommand cmd;

  DerivativeContext ctx;
  ctx.plant = &plant;
  ctx.ref = &ref;
  ctx.config = &config;
  ctx.cmd = &cmd;

  auto record = [&](double t, const SimState& s, const ControlCommand& c) {
    TrajectorySample sample;
    sample.t = t;
    sample.state = s;
    sample.command = c;
    const DynamicsQuantities dyn = compute_dynamics(plant.model, s);
    const CentroidalQuantities cq = centroidal_transform(plant.model, s, dyn);
    sample.momentum = cq.H;
    sample.com = cq.p_c;
    sample.quat_norm_error = std::abs(1.0 - s.base.orientation.norm());
    sample.contact_drift = worst_contact_drift(dyn.kin, ref);
    VecX forces;
    state_derivative(plant, s, c, ref, config, &forces);
    ++ctx.evals;
    sample.contact_forces = forces;
    traj.samples.push_back(std::move(sample));
  };

  for (long long cycle = 0; cycle < cycles; ++cycle) {
    const double t = cycle * config.control_period;
    SimState s = SimState::unpack(y, n);

    const bool bad = !finite(y) ||
                     s.generalized_velocity().cwiseAbs().maxCoeff() >
                         config.guard_velocity ||
                     (n && s.s.cwiseAbs().maxCoeff() > config.guard_position);
    if (bad) {
      traj.diverged = true;
      traj.diverged_time = t;
      traj.note = "state exceeded the divergence guard at t=" + std::to_string(t);
      traj.derivative_evals = ctx.evals;
      return traj;
    }

    // A violent blow-up can overflow inside one control period, before the
    // guard above sees it; treat a failed dynamics evaluation past t=0 as
    // divergence rather than an error.
    try {
      cmd = controller->update(plant.model, s, t, config.control_period);
      if (cycle % per_out == 0) record(t, s, cmd);
      advance_segment(&ctx, &y, config.control_period, &h_adaptive);
    } catch (const ModelError&) {
      if (cycle == 0) throw;
      traj.diverged = true;
      traj.diverged_time = t;
      traj.note = "dynamics evaluation failed at t=" + std::to_string(t) +
                  " (runaway state)";
      traj.derivative_evals = ctx.evals;
      return traj;
    }
  }

  const double t_end = cycles * config.control_period;
  SimState s_end = SimState::unpack(y, n);
  if (!finite(y)) {
    traj.diverged = true;
    traj.diverged_time = t_end;
    traj.note = "state became non-finite by t=" + std::to_string(t_end);
  } else {
    record(t_end, s_end, cmd);
  }
  traj.derivative_evals = ctx.evals;
  return traj;
}

void static_equilibrium(const RobotModel& model, const SimState& state,
                        VecX* tau, VecX* f) {
  const int n = model.joint_count();
  const int nf = 6 * static_cast<int>(model.contacts.size());
  const DynamicsQuantities dyn = compute_dynamics(model, state);
  MatX a(6 + n, n + nf);
  a.leftCols(n) = dyn.selection;
  a.rightCols(nf) = dyn.contact_jac.transpose();
  const VecX x = pseudo_inverse(a) * dyn.bias;
  const double residual = (a * x - dyn.bias).norm();
  if (residual > 1e-6 * std::max(1.0, dyn.bias.norm()))
    throw ModelError(
        "no static equilibrium: gravity is not supportable by the available "
        "torques and contact wrenches (residual " +
        std::to_string(residual) + ")");
  *tau = x.head(n);
  *f = x.tail(nf);
}

VecX spring_preload_theta(const VecX& s, const VecX& tau, const SeaParams& sea,
                          const ActuationSpec& spec) {
  VecX theta = s;  // rigid rows mirror the joint position
  for (int i = 0; i < spec.size(); ++i) {
    if (spec.joints[i] != Actuation::Elastic) continue;
    theta(i) = (s(i) + tau(i) / sea.stiffness(i)) / sea.gear_ratio(i);
  }
  return theta;
}

}  // namespace seabal
