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

#include "seabal/kinematics.hpp"

#include "seabal/spatial.hpp"

namespace seabal {

KinematicsCache compute_kinematics(const RobotModel& model, const SimState& state) {
  KinematicsCache kin;
  kin.links.resize(model.links.size());

  // Base: mixed twist (pd_B, w) -> spatial velocity at the world origin.
  LinkKin& base = kin.links[0];
  base.rot = state.base.orientation.normalized().toRotationMatrix();
  base.pos = state.base.position;
  base.com = base.pos + base.rot * model.links[0].com;
  base.inertia_w = base.rot * model.links[0].inertia * base.rot.transpose();
  base.axis.setZero();
  base.vel.head<3>() =
      state.base_lin_vel + state.base.position.cross(state.base_ang_vel);
  base.vel.tail<3>() = state.base_ang_vel;
  base.bias_acc.setZero();
  base.bias_acc.head<3>() = state.base_lin_vel.cross(state.base_ang_vel);

  for (size_t l = 1; l < model.links.size(); ++l) {
    const Link& lk = model.links[l];
    const LinkKin& par = kin.links[lk.parent];
    LinkKin& cur = kin.links[l];
    const Vec3 anchor = par.pos + par.rot * lk.joint_origin;
    const Mat3 joint_rot = par.rot * lk.joint_rot;
    const Vec3 world_axis = joint_rot * lk.joint_axis;
    cur.rot = joint_rot *
              Eigen::AngleAxisd(state.s(l - 1), lk.joint_axis).toRotationMatrix();
    cur.pos = anchor;
    cur.com = cur.pos + cur.rot * lk.com;
    cur.inertia_w = cur.rot * lk.inertia * cur.rot.transpose();
    cur.axis.head<3>() = anchor.cross(world_axis);
    cur.axis.tail<3>() = world_axis;
    const double sd = state.s_dot(l - 1);
    cur.vel = par.vel + cur.axis * sd;
    cur.bias_acc = par.bias_acc + cross_motion(cur.vel, cur.axis * sd);
  }

  double m = 0.0;
  kin.com.setZero();
  kin.com_vel.setZero();
  for (size_t l = 0; l < model.links.size(); ++l) {
    const double ml = model.links[l].mass;
    const LinkKin& lk = kin.links[l];
    m += ml;
    kin.com += ml * lk.com;
    // Velocity of the CoM point: v_O + w x c.
    kin.com_vel += ml * (lk.vel.head<3>() + lk.vel.tail<3>().cross(lk.com));
  }
  kin.com /= m;
  kin.com_vel /= m;

  kin.contacts.resize(model.contacts.size());
  for (size_t c = 0; c < model.contacts.size(); ++c) {
    const ContactFrame& f = model.contacts[c];
    const LinkKin& lk = kin.links[f.link];
    kin.contacts[c].rot = lk.rot * f.rot;
    kin.contacts[c].pos = lk.pos + lk.rot * f.origin;
  }
  return kin;
}

MatX contact_jacobian(const RobotModel& model, const KinematicsCache& kin,
                      int contact_index) {
  const int dim = model.velocity_dim();
  const ContactFrame& f = model.contacts[contact_index];
  const Vec3 x = kin.contacts[contact_index].pos;
  MatX j = MatX::Zero(6, dim);
  j.block<3, 3>(0, 0) = Mat3::Identity();
  j.block<3, 3>(0, 3) = -skew(x - kin.links[0].pos);
  j.block<3, 3>(3, 3) = Mat3::Identity();
  for (int l = f.link; l != 0; l = model.links[l].parent) {
    const Vec3 axis = kin.links[l].axis.tail<3>();
    const Vec3 anchor = kin.links[l].pos;
    j.block<3, 1>(0, 6 + l - 1) = axis.cross(x - anchor);
    j.block<3, 1>(3, 6 + l - 1) = axis;
  }
  return j;
}

Vec6 contact_jacobian_dot_nu(const RobotModel& model, const KinematicsCache& kin,
                             int contact_index) {
  const ContactFrame& f = model.contacts[contact_index];
  const LinkKin& lk = kin.links[f.link];
  const Vec3 x = kin.contacts[contact_index].pos;
  const Vec3 w = lk.vel.tail<3>();
  Vec6 out;
  // Acceleration of the contact material point with frozen generalized
  // accelerations: a_O + wd x x + w x (v_O + w x x).
  out.head<3>() = lk.bias_acc.head<3>() + lk.bias_acc.tail<3>().cross(x) +
                  w.cross(lk.vel.head<3>() + w.cross(x));
  out.tail<3>() = lk.bias_acc.tail<3>();
  return out;
}

MatX stacked_contact_jacobian(const RobotModel& model, const KinematicsCache& kin) {
  MatX j(6 * model.contact_count(), model.velocity_dim());
  for (int c = 0; c < model.contact_count(); ++c)
    j.middleRows<6>(6 * c) = contact_jacobian(model, kin, c);
  return j;
}

VecX stacked_contact_jacobian_dot_nu(const RobotModel& model,
                                     const KinematicsCache& kin) {
  VecX v(6 * model.contact_count());
  for (int c = 0; c < model.contact_count(); ++c)
    v.segment<6>(6 * c) = contact_jacobian_dot_nu(model, kin, c);
  return v;
}

}  // namespace seabal
