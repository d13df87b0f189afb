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

#include "seabal/state.hpp"

namespace seabal {

VecX SimState::generalized_velocity() const {
  VecX nu(6 + s.size());
  nu.head<3>() = base_lin_vel;
  nu.segment<3>(3) = base_ang_vel;
  nu.tail(s.size()) = s_dot;
  return nu;
}

VecX SimState::pack() const {
  const int n = joint_count();
  VecX x(packed_size(n));
  x.segment<3>(0) = base.position;
  x(3) = base.orientation.w();
  x(4) = base.orientation.x();
  x(5) = base.orientation.y();
  x(6) = base.orientation.z();
  x.segment(7, n) = s;
  x.segment(7 + n, n) = theta;
  x.segment<3>(7 + 2 * n) = base_lin_vel;
  x.segment<3>(10 + 2 * n) = base_ang_vel;
  x.segment(13 + 2 * n, n) = s_dot;
  x.segment(13 + 3 * n, n) = theta_dot;
  return x;
}

SimState SimState::unpack(const VecX& x, int n) {
  SimState st = make_state(n);
  st.base.position = x.segment<3>(0);
  st.base.orientation = Quat(x(3), x(4), x(5), x(6));  // w, x, y, z
  st.s = x.segment(7, n);
  st.theta = x.segment(7 + n, n);
  st.base_lin_vel = x.segment<3>(7 + 2 * n);
  st.base_ang_vel = x.segment<3>(10 + 2 * n);
  st.s_dot = x.segment(13 + 2 * n, n);
  st.theta_dot = x.segment(13 + 3 * n, n);
  return st;
}

SimState make_state(int n) {
  SimState st;
  st.s = VecX::Zero(n);
  st.theta = VecX::Zero(n);
  st.s_dot = VecX::Zero(n);
  st.theta_dot = VecX::Zero(n);
  return st;
}

}  // namespace seabal
