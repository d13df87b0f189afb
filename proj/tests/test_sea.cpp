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
#include <random>

#include "doctest.h"
#include "seabal/sea.hpp"

using namespace seabal;

namespace {
ActuationSpec mixed_spec() {
  ActuationSpec spec;
  spec.joints = {Actuation::Elastic, Actuation::Rigid, Actuation::Elastic,
                 Actuation::Rigid};
  return spec;
}
}  // namespace

TEST_CASE("actuation partition bookkeeping") {
  const ActuationSpec spec = mixed_spec();
  CHECK(spec.size() == 4);
  CHECK(spec.elastic_count() == 2);
  CHECK_FALSE(spec.all_rigid());
  CHECK_FALSE(spec.all_elastic());
  CHECK(ActuationSpec::uniform(3, Actuation::Elastic).all_elastic());
  CHECK(ActuationSpec::uniform(3, Actuation::Rigid).all_rigid());

  VecX full(4);
  full << 1.0, 2.0, 3.0, 4.0;
  const VecX el = spec.elastic_part(full);
  REQUIRE(el.size() == 2);
  CHECK(el(0) == 1.0);
  CHECK(el(1) == 3.0);
  VecX el2(2);
  el2 << 9.0, 8.0;
  const VecX back = spec.expand_elastic(el2, -1.0);
  CHECK(back(0) == 9.0);
  CHECK(back(1) == -1.0);
  CHECK(back(2) == 8.0);
  CHECK(back(3) == -1.0);
}

TEST_CASE("spring torque at a tenth radian deflection") {
  // Stiffness 350 and a 0.1 rad gear-side deflection give 35 units of torque.
  const ActuationSpec spec = ActuationSpec::uniform(1, Actuation::Elastic);
  const SeaParams p = SeaParams::uniform(1, 350.0, 0.25, 0.01, 1e-5);
  VecX theta(1), theta_dot(1), s(1), s_dot(1);
  theta << (0.3 + 0.1) / 0.01;  // gear side angle whose output is s + 0.1
  theta_dot << 0.0;
  s << 0.3;
  s_dot << 0.0;
  const VecX tau = coupling_torque(theta, theta_dot, s, s_dot, p, spec);
  REQUIRE(tau.size() == 1);
  CHECK(tau(0) == doctest::Approx(35.0).epsilon(1e-12));
}

TEST_CASE("coupling torque includes relative rate damping") {
  const ActuationSpec spec = ActuationSpec::uniform(1, Actuation::Elastic);
  const SeaParams p = SeaParams::uniform(1, 350.0, 0.25, 0.01, 1e-5);
  VecX theta(1), theta_dot(1), s(1), s_dot(1);
  theta << 10.0;
  theta_dot << 200.0;  // gear side rate 2.0
  s << 0.1;
  s_dot << 0.5;
  const VecX tau = coupling_torque(theta, theta_dot, s, s_dot, p, spec);
  CHECK(tau(0) == doctest::Approx(350.0 * (0.1 - 0.1) + 0.25 * (2.0 - 0.5)));
}

TEST_CASE("coupling torque is linear in its inputs") {
  const ActuationSpec spec = ActuationSpec::uniform(3, Actuation::Elastic);
  const SeaParams p = SeaParams::uniform(3, 123.0, 0.7, 0.02, 1e-5);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  auto rand_vec = [&] {
    VecX v(3);
    for (int i = 0; i < 3; ++i) v(i) = u(rng);
    return v;
  };
  const VecX a1 = rand_vec(), a2 = rand_vec(), a3 = rand_vec(), a4 = rand_vec();
  const VecX b1 = rand_vec(), b2 = rand_vec(), b3 = rand_vec(), b4 = rand_vec();
  const VecX lhs = coupling_torque(a1 + b1, a2 + b2, a3 + b3, a4 + b4, p, spec);
  const VecX rhs = coupling_torque(a1, a2, a3, a4, p, spec) +
                   coupling_torque(b1, b2, b3, b4, p, spec);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("transmission power balances spring storage and dissipation") {
  // Power entering through the gear minus power delivered to the link equals
  // stored spring power plus damper loss, for arbitrary states.
  const ActuationSpec spec = ActuationSpec::uniform(2, Actuation::Elastic);
  SeaParams p = SeaParams::uniform(2, 350.0, 0.25, 0.01, 1e-5);
  p.stiffness(1) = 80.0;
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 25; ++trial) {
    VecX theta(2), theta_dot(2), s(2), s_dot(2);
    for (int i = 0; i < 2; ++i) {
      theta(i) = u(rng);
      theta_dot(i) = u(rng);
      s(i) = u(rng);
      s_dot(i) = u(rng);
    }
    const VecX tau = coupling_torque(theta, theta_dot, s, s_dot, p, spec);
    double gear_minus_link = 0.0, stored_plus_lost = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double g = p.gear_ratio(i);
      const double defl = g * theta(i) - s(i);
      const double rate = g * theta_dot(i) - s_dot(i);
      gear_minus_link += tau(i) * g * theta_dot(i) - tau(i) * s_dot(i);
      stored_plus_lost += p.stiffness(i) * defl * rate + p.damping(i) * rate * rate;
    }
    CHECK(gear_minus_link == doctest::Approx(stored_plus_lost).epsilon(1e-10));
  }
}

TEST_CASE("motor acceleration from torque and gear reaction") {
  const ActuationSpec spec = ActuationSpec::uniform(2, Actuation::Elastic);
  const SeaParams p = SeaParams::uniform(2, 350.0, 0.25, 0.01, 1e-5);
  VecX tau_m(2), tau(2);
  tau_m << 0.2, -0.1;
  tau << 3.0, 5.0;
  const VecX acc = motor_acceleration(tau_m, tau, p, spec);
  CHECK(acc(0) == doctest::Approx((0.2 - 0.01 * 3.0) / 1e-5));
  CHECK(acc(1) == doctest::Approx((-0.1 - 0.01 * 5.0) / 1e-5));
}

TEST_CASE("mixed chains only couple the elastic rows") {
  // Constants live on full joint rows; the spec gathers the elastic ones.
  const ActuationSpec spec = mixed_spec();
  SeaParams p = SeaParams::uniform(4, 350.0, 0.0, 0.01, 1e-5);
  p.stiffness(1) = 1e9;  // rigid rows must be ignored entirely
  p.stiffness(3) = 1e9;
  VecX theta(2), theta_dot(2);
  theta << 100.0, 50.0;
  theta_dot << 0.0, 0.0;
  VecX s_full(4), s_dot_full(4);
  s_full << 0.5, 9.9, 0.2, -9.9;
  s_dot_full.setZero();
  const VecX tau =
      coupling_torque(theta, theta_dot, spec.elastic_part(s_full),
                      spec.elastic_part(s_dot_full), p, spec);
  REQUIRE(tau.size() == 2);
  CHECK(tau(0) == doctest::Approx(350.0 * (1.0 - 0.5)));
  CHECK(tau(1) == doctest::Approx(350.0 * (0.5 - 0.2)));
}

TEST_CASE("stiff transmission limit reflects motor inertia by the gear square") {
  const ActuationSpec spec = mixed_spec();
  const SeaParams p = SeaParams::uniform(4, 350.0, 0.25, 0.01, 1e-5);
  const RigidLimitModel lim = rigid_limit_model(p, spec);
  REQUIRE(lim.reflected_inertia.size() == 4);
  CHECK(lim.reflected_inertia(0) == doctest::Approx(1e-5 / (0.01 * 0.01)));
  CHECK(lim.reflected_inertia(1) == 0.0);
  CHECK(lim.reflected_inertia(2) == doctest::Approx(0.1));
  CHECK(lim.reflected_inertia(3) == 0.0);
  CHECK(lim.input_scale(0) == doctest::Approx(100.0));
  CHECK(lim.input_scale(1) == doctest::Approx(1.0));
}

TEST_CASE("uniform parameter factory fills every channel") {
  const SeaParams p = SeaParams::uniform(3, 350.0, 0.25, 0.01, 1e-5, 0.34);
  CHECK(p.stiffness.size() == 3);
  CHECK((p.stiffness.array() == 350.0).all());
  CHECK((p.damping.array() == 0.25).all());
  CHECK((p.gear_ratio.array() == 0.01).all());
  CHECK((p.motor_inertia.array() == 1e-5).all());
  CHECK((p.tau_m_max.array() == 0.34).all());
}
