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

#include "seabal/centroidal.hpp"

#include <Eigen/Cholesky>

#include "seabal/spatial.hpp"

namespace seabal {

CentroidalQuantities centroidal_transform(const RobotModel& model,
                                          const SimState& state,
                                          const DynamicsQuantities& dyn) {
  const int n = model.joint_count();
  const int dim = 6 + n;
  const KinematicsCache& kin = dyn.kin;

  CentroidalQuantities cq;
  cq.mass = model.total_mass;
  cq.gravity = model.gravity;
  cq.p_c = kin.com;

  // Point transport base -> CoM for the mixed twist.
  const Mat6 x = transport_motion(state.base.position, kin.com);
  Mat6 x_inv = Mat6::Identity();
  x_inv.block<3, 3>(0, 3) = skew(kin.com - state.base.position);

  const Mat6 m_bb = dyn.mass_matrix.topLeftCorner<6, 6>();
  const MatX m_bj = dyn.mass_matrix.topRightCorner(6, n);
  const Eigen::LDLT<Mat6> m_bb_fact(m_bb);

  cq.M_b = x_inv.transpose() * m_bb * x_inv;  // = diag(m I3, I_C)
  cq.locked_inertia = cq.M_b.block<3, 3>(3, 3);
  const MatX m_bb_inv_m_bj = m_bb_fact.solve(m_bj);
  cq.M_j = dyn.mass_matrix.bottomRightCorner(n, n) -
           m_bj.transpose() * m_bb_inv_m_bj;

  cq.T = MatX::Identity(dim, dim);
  cq.T.topLeftCorner<6, 6>() = x;
  cq.T.topRightCorner(6, n) =
      cq.M_b.ldlt().solve(x_inv.transpose() * m_bj);
  cq.T_inv = MatX::Identity(dim, dim);
  cq.T_inv.topLeftCorner<6, 6>() = x_inv;
  cq.T_inv.topRightCorner(6, n) = -m_bb_inv_m_bj;

  const VecX nu = state.generalized_velocity();
  cq.v_bar = cq.T * nu;
  cq.v_B = cq.v_bar.head<6>();
  cq.H = cq.M_b * cq.v_B;

  // Rate of the locked inertia and of the momentum map (at frozen
  // accelerations), both needed for the transformed bias.
  Mat3 ic_dot = Mat3::Zero();
  Vec6 phi_dot_o = Vec6::Zero();  // d/dt of momentum about the origin, bias part
  for (size_t l = 0; l < model.links.size(); ++l) {
    const LinkKin& lk = kin.links[l];
    const double ml = model.links[l].mass;
    const Vec3 w = lk.vel.tail<3>();
    const Vec3 com_vel = lk.vel.head<3>() + w.cross(lk.com);
    const Vec3 d = lk.com - kin.com;
    const Vec3 d_dot = com_vel - kin.com_vel;
    ic_dot += skew(w) * lk.inertia_w - lk.inertia_w * skew(w) -
              ml * (skew(d_dot) * skew(d) + skew(d) * skew(d_dot));
    const Mat6 inertia = spatial_inertia_at_origin(ml, lk.com, lk.inertia_w);
    phi_dot_o += inertia * lk.bias_acc + cross_force(lk.vel, inertia * lk.vel);
  }
  cq.locked_inertia_dot = ic_dot;

  Vec6 a_dot_nu;  // bias rate of the momentum about the (moving) CoM
  a_dot_nu.head<3>() = phi_dot_o.head<3>();
  a_dot_nu.tail<3>() = phi_dot_o.tail<3>() - kin.com_vel.cross(cq.H.head<3>()) -
                       kin.com.cross(phi_dot_o.head<3>());

  Mat6 m_b_dot = Mat6::Zero();
  m_b_dot.block<3, 3>(3, 3) = ic_dot;
  const Vec6 u = cq.M_b.ldlt().solve(a_dot_nu - m_b_dot * cq.v_B);

  VecX shift = VecX::Zero(dim);
  shift.head<6>() = x_inv * u;
  const VecX h_bar =
      cq.T_inv.transpose() * (dyn.bias - dyn.mass_matrix * shift);
  cq.h_b = h_bar.head<6>();
  cq.h_j = h_bar.tail(n);

  const int rows = 6 * model.contact_count();
  const MatX jb_mixed = dyn.contact_jac.leftCols(6);
  cq.J_b = jb_mixed * x_inv;
  cq.J_j = dyn.contact_jac.rightCols(n) - jb_mixed * m_bb_inv_m_bj;
  cq.J_dot_nu = dyn.contact_jac_dot_nu - jb_mixed * (x_inv * u);
  (void)rows;
  return cq;
}

Vec6 momentum_rate_from_forces(const VecX& f, const CentroidalQuantities& cq) {
  Vec6 rate = Vec6::Zero();
  rate(2) = -cq.mass * cq.gravity;
  if (f.size()) rate += cq.J_b.transpose() * f;
  return rate;
}

MatX jg_bar(const CentroidalQuantities& cq, bool* rank_deficient) {
  int rank = 0;
  const MatX jb_pinv = pseudo_inverse(cq.J_b, 1e-8, &rank);
  if (rank_deficient) *rank_deficient = rank < 6;
  return -cq.M_b * jb_pinv * cq.J_j;
}

MatX jg_bar_at(const RobotModel& model, const SimState& state, const VecX& s_eval,
               bool* rank_deficient) {
  SimState probe = make_state(model.joint_count());
  probe.base = state.base;
  probe.s = s_eval;
  const DynamicsQuantities dyn = compute_dynamics(model, probe);
  const CentroidalQuantities cq = centroidal_transform(model, probe, dyn);
  return jg_bar(cq, rank_deficient);
}

}  // namespace seabal
