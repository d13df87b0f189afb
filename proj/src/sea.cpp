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

#include "seabal/sea.hpp"

namespace seabal {

int ActuationSpec::elastic_count() const {
  int k = 0;
  for (Actuation a : joints)
    if (a == Actuation::Elastic) ++k;
  return k;
}

bool ActuationSpec::all_rigid() const { return elastic_count() == 0; }

bool ActuationSpec::all_elastic() const { return elastic_count() == size(); }

ActuationSpec ActuationSpec::uniform(int n, Actuation a) {
  ActuationSpec s;
  s.joints.assign(n, a);
  return s;
}

VecX ActuationSpec::elastic_part(const VecX& full) const {
  VecX out(elastic_count());
  int k = 0;
  for (int i = 0; i < size(); ++i)
    if (joints[i] == Actuation::Elastic) out(k++) = full(i);
  return out;
}

VecX ActuationSpec::expand_elastic(const VecX& elastic, double fill) const {
  VecX out = VecX::Constant(size(), fill);
  int k = 0;
  for (int i = 0; i < size(); ++i)
    if (joints[i] == Actuation::Elastic) out(i) = elastic(k++);
  return out;
}

SeaParams SeaParams::uniform(int n, double ks, double kd, double gamma, double im,
                             double tau_max) {
  SeaParams p;
  p.stiffness = VecX::Constant(n, ks);
  p.damping = VecX::Constant(n, kd);
  p.gear_ratio = VecX::Constant(n, gamma);
  p.motor_inertia = VecX::Constant(n, im);
  p.tau_m_max = VecX::Constant(n, tau_max);
  return p;
}

VecX coupling_torque(const VecX& theta, const VecX& theta_dot, const VecX& s,
                     const VecX& s_dot, const SeaParams& params,
                     const ActuationSpec& spec) {
  const VecX ks = spec.elastic_part(params.stiffness);
  const VecX kd = spec.elastic_part(params.damping);
  const VecX g = spec.elastic_part(params.gear_ratio);
  return ks.cwiseProduct(g.cwiseProduct(theta) - s) +
         kd.cwiseProduct(g.cwiseProduct(theta_dot) - s_dot);
}

VecX motor_acceleration(const VecX& tau_m, const VecX& tau, const SeaParams& params,
                        const ActuationSpec& spec) {
  const VecX g = spec.elastic_part(params.gear_ratio);
  const VecX im = spec.elastic_part(params.motor_inertia);
  return (tau_m - g.cwiseProduct(tau)).cwiseQuotient(im);
}

RigidLimitModel rigid_limit_model(const SeaParams& params, const ActuationSpec& spec) {
  RigidLimitModel out;
  const int n = spec.size();
  out.reflected_inertia = VecX::Zero(n);
  out.input_scale = VecX::Ones(n);
  for (int i = 0; i < n; ++i) {
    if (spec.joints[i] != Actuation::Elastic) continue;
    const double g = params.gear_ratio(i);
    out.reflected_inertia(i) = params.motor_inertia(i) / (g * g);
    out.input_scale(i) = 1.0 / g;
  }
  return out;
}

}  // namespace seabal
