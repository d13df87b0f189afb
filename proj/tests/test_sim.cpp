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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "seabal/sim.hpp"

using namespace seabal;

namespace {

RobotModel biped() {
  return load_model(std::string(SEABAL_DATA_DIR) + "/models/biped5.model");
}

SeaParams default_sea(int n) {
  return SeaParams::uniform(n, 350.0, 0.25, 0.01, 1e-5);
}

ContactReference ref_at(const RobotModel& model, const SimState& state) {
  return capture_contact_reference(model, compute_dynamics(model, state).kin);
}

// Constant-output controller: turns the closed loop into an autonomous flow,
// which keeps convergence studies free of feedback discontinuities.
class ConstantController : public ControllerBase {
 public:
  explicit ConstantController(ControlCommand cmd) : cmd_(std::move(cmd)) {}
  ControlCommand update(const RobotModel&, const SimState&, double, double) override {
    return cmd_;
  }

 private:
  ControlCommand cmd_;
};

SimState consistent_state(const RobotModel& model, uint64_t seed,
                          double pos_scale = 0.03, double vel_scale = 0.15) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  const int n = model.joint_count();
  SimState st = make_state(n);
  for (int i = 0; i < n; ++i) st.s(i) += pos_scale * dist(rng);
  st.theta = st.s;
  const DynamicsQuantities dyn = compute_dynamics(model, st);
  VecX nu = VecX::Zero(6 + n);
  for (int i = 0; i < 6 + n; ++i) nu(i) = vel_scale * dist(rng);
  const MatX& J = dyn.contact_jac;
  nu -= J.completeOrthogonalDecomposition().pseudoInverse() * (J * nu);
  st.base_lin_vel = nu.segment(0, 3);
  st.base_ang_vel = nu.segment(3, 3);
  st.s_dot = nu.tail(n);
  st.theta_dot = st.s_dot;
  return st;
}

// Elastic plant released slightly off its preload: a smooth, bounded free
// oscillation of springs, motors and contact-constrained links.
struct FreeOscillation {
  Plant plant;
  SimState initial;
  ControlCommand hold;
};

FreeOscillation free_oscillation() {
  FreeOscillation out;
  const RobotModel model = biped();
  const int n = model.joint_count();
  out.plant = make_elastic_plant(model, default_sea(n));
  out.initial = make_state(n);
  VecX tau_static, f_static;
  static_equilibrium(model, out.initial, &tau_static, &f_static);
  out.initial.theta = spring_preload_theta(out.initial.s, tau_static,
                                           out.plant.sea, out.plant.actuation);
  out.initial.theta(2) += 0.5;  // ankle spring wound an extra 5 mrad link-side
  out.initial.theta(3) -= 0.3;
  out.hold.joint_torque = VecX::Zero(n);
  out.hold.motor_torque =
      out.plant.actuation.elastic_part(out.plant.sea.gear_ratio)
          .cwiseProduct(out.plant.actuation.elastic_part(tau_static));
  return out;
}

ControllerGains balance_gains(int n) {
  ControllerGains g;
  g.momentum_p.diagonal() << 50, 50, 50, 10, 10, 10;
  g.momentum_i.diagonal() << 100, 100, 100, 16, 16, 16;
  g.postural_p = 100.0 * MatX::Identity(n, n);
  g.postural_d = 20.0 * MatX::Identity(n, n);
  g.motor_gain = 1000.0 * VecX::Ones(n);
  return g;
}

}  // namespace

TEST_CASE("packed derivative mirrors velocities and restores the quaternion") {
  const RobotModel model = biped();
  const int n = model.joint_count();
  const Plant plant = make_rigid_plant(model);
  SimState st = consistent_state(model, 1);
  const ContactReference ref = ref_at(model, st);
  ControlCommand cmd;
  cmd.joint_torque = VecX::Zero(n);
  SimConfig cfg;

  const VecX dx = state_derivative(plant, st, cmd, ref, cfg);
  CHECK((dx.segment(0, 3) - st.base_lin_vel).norm() == 0.0);
  CHECK((dx.segment(7, n) - st.s_dot).norm() == 0.0);
  // Rigid transmissions mirror the joints on the motor side.
  CHECK((dx.segment(7 + n, n) - st.s_dot).norm() == 0.0);
  CHECK((dx.segment(13 + 2 * n, n) - dx.segment(13 + 3 * n, n)).norm() < 1e-12);

  // Unit quaternion: the derivative is norm-preserving.
  Eigen::Vector4d q(st.base.orientation.w(), st.base.orientation.x(),
                    st.base.orientation.y(), st.base.orientation.z());
  CHECK(std::abs(q.dot(dx.segment(3, 4))) < 1e-12);

  // Inflated quaternion: the derivative pushes the norm back down at the
  // configured rate, d|q|^2/dt = 2 k (1 - |q|^2) |q|^2.
  SimState big = st;
  big.base.orientation.coeffs() *= 1.05;
  const VecX dx_big = state_derivative(plant, big, cmd, ref, cfg);
  Eigen::Vector4d qb(big.base.orientation.w(), big.base.orientation.x(),
                     big.base.orientation.y(), big.base.orientation.z());
  const double got = 2.0 * qb.dot(dx_big.segment(3, 4));
  const double n2 = qb.squaredNorm();
  const double want = 2.0 * cfg.quat_gain * (1.0 - n2) * n2;
  CHECK(got == doctest::Approx(want).epsilon(1e-9));
  CHECK(got < 0.0);
}

TEST_CASE("constrained accelerations keep the contact frame still") {
  const RobotModel model = biped();
  const int n = model.joint_count();
  const Plant plant = make_rigid_plant(model);
  for (uint64_t seed : {2u, 3u}) {
    const SimState st = consistent_state(model, seed);
    const ContactReference ref = ref_at(model, st);
    ControlCommand cmd;
    cmd.joint_torque = VecX::Zero(n);
    SimConfig cfg;
    const VecX dx = state_derivative(plant, st, cmd, ref, cfg);
    const DynamicsQuantities dyn = compute_dynamics(model, st);
    VecX acc(6 + n);
    acc << dx.segment(7 + 2 * n, 3), dx.segment(10 + 2 * n, 3),
        dx.segment(13 + 2 * n, n);
    const VecX contact_acc = dyn.contact_jac * acc + dyn.contact_jac_dot_nu;
    CHECK(contact_acc.lpNorm<Eigen::Infinity>() < 1e-8);
  }
}

TEST_CASE("static equilibrium is a fixed point of the closed plant") {
  const RobotModel model = biped();
  const int n = model.joint_count();
  const SimState st = make_state(n);
  VecX tau_static, f_static;
  static_equilibrium(model, st, &tau_static, &f_static);

  SUBCASE("rigid plant under the gravity torque") {
    const Plant plant = make_rigid_plant(model);
    ControlCommand cmd;
    cmd.joint_torque = tau_static;
    VecX forces;
    const VecX dx =
        state_derivative(plant, st, cmd, ref_at(model, st), SimConfig(), &forces);
    CHECK(dx.lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK((forces - f_static).norm() < 1e-6 * (1.0 + f_static.norm()));
  }

  SUBCASE("elastic plant at spring preload") {
    const Plant plant = make_elastic_plant(model, default_sea(n));
    SimState pre = st;
    pre.theta =
        spring_preload_theta(st.s, tau_static, plant.sea, plant.actuation);
    ControlCommand cmd;
    cmd.joint_torque = VecX::Zero(n);
    cmd.motor_torque = plant.actuation.elastic_part(plant.sea.gear_ratio)
                           .cwiseProduct(tau_static);
    const VecX dx =
        state_derivative(plant, pre, cmd, ref_at(model, pre), SimConfig());
    CHECK(dx.lpNorm<Eigen::Infinity>() < 1e-8);
    // The preload carries exactly the gravity torque across the spring.
    const VecX delivered = coupling_torque(
        pre.theta, pre.theta_dot, pre.s, pre.s_dot, plant.sea, plant.actuation);
    CHECK((delivered - tau_static).norm() < 1e-10);
  }
}

TEST_CASE("fixed-step integration converges at fourth order") {
  const FreeOscillation f = free_oscillation();
  SimConfig cfg;
  cfg.horizon = 0.2;
  cfg.control_period = 0.2;
  cfg.output_period = 0.2;

  auto final_state = [&](double dt, SimConfig::Method method) {
    SimConfig c = cfg;
    c.dt = dt;
    c.method = method;
    ConstantController ctrl(f.hold);
    const Trajectory traj = run_simulation(f.plant, &ctrl, f.initial, c);
    REQUIRE_FALSE(traj.diverged);
    return traj.samples.back().state.pack();
  };

  // Step sizes sit below the stability edge of the stiff joint-side spring
  // mode but far enough apart to expose the truncation-order slope.
  const VecX ref = final_state(3.125e-5, SimConfig::Method::FixedRK4);
  const double e1 = (final_state(1e-3, SimConfig::Method::FixedRK4) - ref).norm();
  const double e2 = (final_state(5e-4, SimConfig::Method::FixedRK4) - ref).norm();
  const double e3 = (final_state(2.5e-4, SimConfig::Method::FixedRK4) - ref).norm();
  INFO("errors " << e1 << " " << e2 << " " << e3);
  CHECK(e1 > e2);
  CHECK(e2 > e3);
  CHECK(std::log2(e1 / e2) > 3.5);
  CHECK(std::log2(e2 / e3) > 3.5);

  // The adaptive integrator follows the same flow.
  SimConfig tight = cfg;
  tight.method = SimConfig::Method::AdaptiveRK45;
  tight.abs_tol = 1e-12;
  tight.rel_tol = 1e-11;
  ConstantController ctrl(f.hold);
  const Trajectory ad = run_simulation(f.plant, &ctrl, f.initial, tight);
  REQUIRE_FALSE(ad.diverged);
  CHECK((ad.samples.back().state.pack() - ref).norm() < 1e-6);
  CHECK(ad.derivative_evals > 0);
}

TEST_CASE("divergence guards end the run as an outcome") {
  const RobotModel model = biped();
  const int n = model.joint_count();
  const Plant plant = make_rigid_plant(model);
  ControlCommand zero;
  zero.joint_torque = VecX::Zero(n);
  ConstantController ctrl(zero);
  SimConfig cfg;
  cfg.horizon = 0.1;

  SUBCASE("velocity guard") {
    SimState st = make_state(n);
    st.s_dot(0) = 2e4;
    const Trajectory traj = run_simulation(plant, &ctrl, st, cfg);
    CHECK(traj.diverged);
    CHECK(traj.note.size() > 0);
    CHECK(traj.diverged_time < cfg.horizon);
  }

  SUBCASE("position guard") {
    SimState st = make_state(n);
    st.s(1) = 2e3;
    const Trajectory traj = run_simulation(plant, &ctrl, st, cfg);
    CHECK(traj.diverged);
    CHECK(traj.note.size() > 0);
  }
}

TEST_CASE("numeric blow-up inside a control period counts as divergence") {
  const RobotModel model = biped();
  const int n = model.joint_count();
  const Plant plant = make_elastic_plant(model, default_sea(n));
  SimState st = make_state(n);
  // Large enough that quadratic-rate terms overflow within a few control
  // cycles, small enough that the very first cycle still evaluates finitely.
  st.s_dot.setConstant(1e4);
  ControlCommand zero;
  zero.joint_torque = VecX::Zero(n);
  ConstantController ctrl(zero);
  SimConfig cfg;
  cfg.horizon = 0.01;
  cfg.control_period = 2e-4;
  cfg.dt = 2e-4;
  cfg.guard_velocity = 1e300;  // let the arithmetic fail first
  cfg.guard_position = 1e300;
  const Trajectory traj = run_simulation(plant, &ctrl, st, cfg);
  CHECK(traj.diverged);
  CHECK(traj.note.find("dynamics evaluation failed") != std::string::npos);
}

TEST_CASE("ideal velocity mode pins the motor rate") {
  const RobotModel model = biped();
  const int n = model.joint_count();
  const Plant plant = make_elastic_plant(model, default_sea(n));
  const SimState st = consistent_state(model, 5);
  ControlCommand cmd;
  cmd.joint_torque = VecX::Zero(n);
  cmd.theta_dot_d = VecX::LinSpaced(n, -1.0, 1.0);
  SimConfig cfg;
  cfg.ideal_velocity = true;
  const VecX dx = state_derivative(plant, st, cmd, ref_at(model, st), cfg);
  CHECK((dx.segment(7 + n, n) - cmd.theta_dot_d).norm() == 0.0);
  CHECK(dx.segment(13 + 3 * n, n).norm() == 0.0);
}

TEST_CASE("reflected inertia augments the joint-space dynamics") {
  const RobotModel model = biped();
  const int n = model.joint_count();
  Plant plant = make_rigid_plant(model);
  plant.reflected_inertia = VecX::LinSpaced(n, 0.05, 0.3);

  const SimState st = consistent_state(model, 6);
  const ContactReference ref = ref_at(model, st);
  ControlCommand cmd;
  cmd.joint_torque = VecX::LinSpaced(n, -0.5, 0.5);
  const VecX dx = state_derivative(plant, st, cmd, ref, SimConfig());

  // Re-derive the accelerations from the augmented KKT system directly.
  DynamicsQuantities dyn = compute_dynamics(model, st);
  dyn.mass_matrix.bottomRightCorner(n, n).diagonal() += plant.reflected_inertia;
  const ForwardDynamicsResult fd = constrained_forward_dynamics(
      model, dyn, ref, st.generalized_velocity(), cmd.joint_torque);
  VecX acc(6 + n);
  acc << dx.segment(7 + 2 * n, 3), dx.segment(10 + 2 * n, 3),
      dx.segment(13 + 2 * n, n);
  CHECK((acc - fd.nu_dot).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("sampling cadence, bookkeeping and determinism") {
  const FreeOscillation f = free_oscillation();
  SimConfig cfg;
  cfg.horizon = 0.05;
  cfg.output_period = 0.01;
  cfg.control_period = 1e-3;
  ConstantController a(f.hold), b(f.hold);
  const Trajectory ta = run_simulation(f.plant, &a, f.initial, cfg);
  const Trajectory tb = run_simulation(f.plant, &b, f.initial, cfg);
  REQUIRE(ta.samples.size() == 6);
  for (size_t k = 0; k < ta.samples.size(); ++k) {
    CHECK(ta.samples[k].t == doctest::Approx(0.01 * double(k)).epsilon(1e-12));
    CHECK((ta.samples[k].state.pack() - tb.samples[k].state.pack()).norm() ==
          0.0);
  }
  CHECK(ta.derivative_evals == tb.derivative_evals);
  CHECK(ta.derivative_evals > 0);
}

TEST_CASE("momentum decays in closed loop after a velocity push") {
  const RobotModel model = biped();
  const int n = model.joint_count();
  const Plant plant = make_rigid_plant(model);
  SimState st = consistent_state(model, 7, 0.0, 0.3);

  References refs;
  refs.com0 = oracle::robot_com(model, make_state(n));
  refs.s_nominal = VecX::Zero(n);
  refs.s_step = VecX::Zero(n);
  ContactConstraintSpec cspec;
  cspec.cop_x_min = -0.04;
  cspec.cop_x_max = 0.04;
  cspec.cop_y_min = -0.025;
  cspec.cop_y_max = 0.025;
  RigidBalanceController ctrl(balance_gains(n), refs, cspec);

  SimConfig cfg;
  cfg.horizon = 1.5;
  const Trajectory traj = run_simulation(plant, &ctrl, st, cfg);
  REQUIRE_FALSE(traj.diverged);
  const double h0 = traj.samples.front().momentum.norm();
  const double h1 = traj.samples.back().momentum.norm();
  CHECK(h0 > 1e-2);
  CHECK(h1 < 1e-3);
  CHECK(traj.samples.back().state.s.lpNorm<Eigen::Infinity>() < 0.5);
}

TEST_CASE("static equilibrium needs a contact to lean on") {
  RobotModel m;
  m.links.resize(2);
  m.links[0].name = "base";
  m.links[0].mass = 1.0;
  m.links[0].inertia = Mat3::Identity() * 0.01;
  m.links[1].name = "arm";
  m.links[1].parent = 0;
  m.links[1].mass = 0.5;
  m.links[1].inertia = Mat3::Identity() * 0.005;
  m.links[1].joint_name = "shoulder";
  m.links[1].joint_axis = Vec3::UnitX();
  m.links[1].joint_origin = Vec3(0, 0, 0.2);
  m.total_mass = 1.5;
  const SimState st = make_state(1);
  VecX tau, f;
  CHECK_THROWS_AS(static_equilibrium(m, st, &tau, &f), ModelError);
}
