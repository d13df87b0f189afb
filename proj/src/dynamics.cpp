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

#include "seabal/dynamics.hpp"

#include <Eigen/LU>

#include "seabal/spatial.hpp"

namespace seabal {
namespace {

// Mixed base twist (pd_B, w) -> spatial velocity at the world origin.
Mat6 base_twist_map(const Vec3& p_base) {
  Mat6 t = Mat6::Identity();
  t.block<3, 3>(0, 3) = skew(p_base);
  return t;
}

}  // namespace

DynamicsQuantities compute_dynamics(const RobotModel& model, const SimState& state) {
  const int n = model.joint_count();
  const int dim = 6 + n;
  const size_t nl = model.links.size();

  DynamicsQuantities dyn;
  dyn.kin = compute_kinematics(model, state);
  const KinematicsCache& kin = dyn.kin;

  // Composite rigid-body pass in world-origin Plucker coordinates, where
  // child inertias add to the parent without any transform.
  std::vector<Mat6> composite(nl);
  for (size_t l = 0; l < nl; ++l)
    composite[l] = spatial_inertia_at_origin(model.links[l].mass,
                                             kin.links[l].com,
                                             kin.links[l].inertia_w);
  for (size_t l = nl - 1; l >= 1; --l)
    composite[model.links[l].parent] += composite[l];

  const Mat6 tb = base_twist_map(state.base.position);
  MatX m = MatX::Zero(dim, dim);
  m.topLeftCorner<6, 6>() = tb.transpose() * composite[0] * tb;
  for (size_t l = 1; l < nl; ++l) {
    const int j = static_cast<int>(l) - 1;
    const Vec6 force = composite[l] * kin.links[l].axis;
    m.block<6, 1>(0, 6 + j) = tb.transpose() * force;
    m.block<1, 6>(6 + j, 0) = m.block<6, 1>(0, 6 + j).transpose();
    m(6 + j, 6 + j) = kin.links[l].axis.dot(force);
    for (int w = model.links[l].parent; w != 0; w = model.links[w].parent) {
      m(6 + j, 6 + w - 1) = kin.links[w].axis.dot(force);
      m(6 + w - 1, 6 + j) = m(6 + j, 6 + w - 1);
    }
  }
  dyn.mass_matrix = m;

  // Newton-Euler with zero generalized acceleration: the required forces are
  // exactly the Coriolis/centrifugal/gravity bias.
  std::vector<Vec6> net(nl);
  for (size_t l = 0; l < nl; ++l) {
    const LinkKin& lk = kin.links[l];
    const Mat6 inertia = spatial_inertia_at_origin(model.links[l].mass, lk.com,
                                                   lk.inertia_w);
    Vec6 gravity = Vec6::Zero();
    gravity(2) = -model.links[l].mass * model.gravity;
    gravity.tail<3>() = lk.com.cross(gravity.head<3>());
    net[l] = inertia * lk.bias_acc + cross_force(lk.vel, inertia * lk.vel) -
             gravity;
  }
  for (size_t l = nl - 1; l >= 1; --l) net[model.links[l].parent] += net[l];
  VecX h(dim);
  h.head<6>() = tb.transpose() * net[0];
  for (size_t l = 1; l < nl; ++l) h(6 + l - 1) = kin.links[l].axis.dot(net[l]);
  dyn.bias = h;

  dyn.selection = MatX::Zero(dim, n);
  dyn.selection.bottomRows(n).setIdentity();
  dyn.contact_jac = stacked_contact_jacobian(model, kin);
  dyn.contact_jac_dot_nu = stacked_contact_jacobian_dot_nu(model, kin);
  return dyn;
}

double kinetic_energy(const DynamicsQuantities& dyn, const VecX& nu) {
  return 0.5 * nu.dot(dyn.mass_matrix * nu);
}

Vec6 spatial_momentum(const DynamicsQuantities& dyn, const VecX& nu) {
  // The base rows of M nu are the momentum about the world origin pulled back
  // through the mixed-twist map; undo that map.
  const Vec6 b = (dyn.mass_matrix * nu).head<6>();
  Vec6 hm;
  hm.head<3>() = b.head<3>();
  hm.tail<3>() = dyn.kin.links[0].pos.cross(b.head<3>()) + b.tail<3>();
  return hm;
}

ContactReference capture_contact_reference(const RobotModel& model,
                                           const KinematicsCache& kin) {
  ContactReference ref;
  for (int c = 0; c < model.contact_count(); ++c) {
    ref.pos.push_back(kin.contacts[c].pos);
    ref.rot.push_back(kin.contacts[c].rot);
  }
  return ref;
}

ForwardDynamicsResult constrained_forward_dynamics(
    const RobotModel& model, const DynamicsQuantities& dyn,
    const ContactReference& ref, const VecX& nu, const VecX& tau,
    double stab_kp, double stab_kd) {
  const int dim = model.velocity_dim();
  const int nc = model.contact_count();
  const int rows = 6 * nc;

  ForwardDynamicsResult out;
  if (nc == 0) {
    out.nu_dot = dyn.mass_matrix.ldlt().solve(dyn.selection * tau - dyn.bias);
    out.contact_forces = VecX();
    return out;
  }

  VecX stab = VecX::Zero(rows);
  for (int c = 0; c < nc; ++c) {
    const ContactKin& ck = dyn.kin.contacts[c];
    stab.segment<3>(6 * c) = ck.pos - ref.pos[c];
    stab.segment<3>(6 * c + 3) = so3_log(ck.rot * ref.rot[c].transpose());
  }

  MatX kkt = MatX::Zero(dim + rows, dim + rows);
  kkt.topLeftCorner(dim, dim) = dyn.mass_matrix;
  kkt.topRightCorner(dim, rows) = -dyn.contact_jac.transpose();
  kkt.bottomLeftCorner(rows, dim) = dyn.contact_jac;
  VecX rhs(dim + rows);
  rhs.head(dim) = dyn.selection * tau - dyn.bias;
  rhs.tail(rows) = -dyn.contact_jac_dot_nu - stab_kd * (dyn.contact_jac * nu) -
                   stab_kp * stab;

  Eigen::FullPivLU<MatX> lu(kkt);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible()) {
    std::string names;
    for (const ContactFrame& c : model.contacts)
      names += (names.empty() ? "" : ", ") + c.name;
    throw ModelError(
        "contact constraints are singular (dependent rows) for contacts: " +
        names);
  }
  const VecX sol = lu.solve(rhs);
  out.nu_dot = sol.head(dim);
  out.contact_forces = sol.tail(rows);
  return out;
}

}  // namespace seabal
