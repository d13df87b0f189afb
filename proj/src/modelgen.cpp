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

#include "seabal/modelgen.hpp"

#include <random>

#include "seabal/spatial.hpp"

namespace seabal {
namespace {

Vec3 rand_vec(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Vec3(u(rng), u(rng), u(rng));
}

Mat3 rand_inertia(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat3 a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = u(rng);
  const Mat3 g = scale * (a * a.transpose()) + 0.3 * scale * Mat3::Identity();
  // Bit-exact symmetry so the serialized upper triangle loses nothing.
  return 0.5 * (g + g.transpose());
}

}  // namespace

RobotModel random_model(int joints, uint64_t seed, int contacts) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mass_d(0.4, 2.5);
  std::uniform_int_distribution<int> parent_d;

  RobotModel model;
  Link base;
  base.name = "base";
  base.mass = mass_d(rng);
  base.com = rand_vec(rng, 0.05);
  base.inertia = rand_inertia(rng, 0.01);
  model.links.push_back(base);

  for (int j = 0; j < joints; ++j) {
    Link l;
    l.name = "link" + std::to_string(j + 1);
    l.joint_name = "joint" + std::to_string(j);
    l.parent = std::uniform_int_distribution<int>(0, j)(rng);
    l.mass = mass_d(rng);
    l.com = rand_vec(rng, 0.08);
    l.inertia = rand_inertia(rng, 0.004);
    Vec3 axis = rand_vec(rng, 1.0);
    while (axis.norm() < 1e-3) axis = rand_vec(rng, 1.0);
    l.joint_axis = axis.normalized();
    l.joint_origin = rand_vec(rng, 0.25);
    l.joint_rpy = rand_vec(rng, 1.5);
    l.joint_rot = rpy_to_matrix(l.joint_rpy);
    model.links.push_back(l);
  }

  std::uniform_int_distribution<int> link_d(0, joints);
  std::uniform_real_distribution<double> half_d(0.03, 0.09);
  for (int c = 0; c < contacts; ++c) {
    ContactFrame f;
    f.name = "contact" + std::to_string(c);
    f.link = link_d(rng);
    f.origin = rand_vec(rng, 0.1);
    f.rpy = rand_vec(rng, 1.0);
    f.rot = rpy_to_matrix(f.rpy);
    f.half_x = half_d(rng);
    f.half_y = half_d(rng);
    model.contacts.push_back(f);
  }

  model.total_mass = 0.0;
  for (const Link& l : model.links) model.total_mass += l.mass;
  return model;
}

SimState random_state(const RobotModel& model, uint64_t seed,
                      double velocity_scale) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> n(0.0, 1.0);
  const int nj = model.joint_count();
  SimState st = make_state(nj);
  st.base.position = Vec3(n(rng), n(rng), n(rng)) * 0.4;
  Vec4 q(n(rng), n(rng), n(rng), n(rng));
  while (q.norm() < 1e-3) q = Vec4(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  st.base.orientation = Quat(q(0), q(1), q(2), q(3));
  for (int j = 0; j < nj; ++j) {
    st.s(j) = 0.9 * n(rng);
    st.theta(j) = 0.9 * n(rng);
    st.s_dot(j) = velocity_scale * n(rng);
    st.theta_dot(j) = velocity_scale * n(rng);
  }
  st.base_lin_vel = Vec3(n(rng), n(rng), n(rng)) * velocity_scale;
  st.base_ang_vel = Vec3(n(rng), n(rng), n(rng)) * velocity_scale;
  return st;
}

}  // namespace seabal
