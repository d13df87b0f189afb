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
//
// Independent re-derivations used as test oracles.  Everything here is
// deliberately written the slow, obvious way (per-call FK walks, finite
// differences, brute-force enumeration) and shares no code with the library
// implementations it checks.

#ifndef SEABAL_TESTS_SUPPORT_ORACLES_HPP_
#define SEABAL_TESTS_SUPPORT_ORACLES_HPP_

#include <vector>

#include "seabal/model.hpp"
#include "seabal/qp.hpp"
#include "seabal/state.hpp"

namespace seabal {
namespace oracle {

// World pose of one link by walking the chain from the base.
struct LinkPose {
  Mat3 rot;
  Vec3 pos;
};
LinkPose link_pose(const RobotModel& model, const SimState& state, int link);
LinkPose contact_pose(const RobotModel& model, const SimState& state, int contact);

// World CoM position of one link / of the whole robot.
Vec3 link_com(const RobotModel& model, const SimState& state, int link);
Vec3 robot_com(const RobotModel& model, const SimState& state);

// Velocity of an arbitrary link-fixed point via the chain rule (no spatial
// algebra): sums joint-axis contributions walking up the tree.
Vec3 point_velocity(const RobotModel& model, const SimState& state, int link,
                    const Vec3& local_point);
Vec3 link_angular_velocity(const RobotModel& model, const SimState& state, int link);

// Total kinetic energy from per-link CoM velocities and angular velocities.
double kinetic_energy(const RobotModel& model, const SimState& state);

// Mass matrix from the exact polarization of the (exactly quadratic) kinetic
// energy: M_ij = T(e_i + e_j) - T(e_i) - T(e_j).
MatX mass_matrix_energy(const RobotModel& model, const SimState& state);

// Gravity vector from central finite differences of the potential energy
// sum_i m_i g z_i(q), with configuration perturbations applied through the
// same velocity coordinates as the dynamics (base orientation perturbed by
// world-frame rotation vectors).
VecX gravity_from_potential(const RobotModel& model, const SimState& state,
                            double eps = 1e-6);

// Contact Jacobian columns from central finite differences of the contact
// frame pose under velocity-coordinate perturbations.
MatX contact_jacobian_fd(const RobotModel& model, const SimState& state,
                         int contact, double eps = 1e-6);

// Centroidal momentum summed link by link about the instantaneous CoM.
Vec6 centroidal_momentum(const RobotModel& model, const SimState& state);

// Applies a velocity-coordinate displacement d (size 6+n) to a state:
// base position += d(0..2), base orientation perturbed by the world rotation
// vector d(3..5), joints += d(6..).  Velocities untouched.
SimState displace(const RobotModel& model, const SimState& state, const VecX& d);

// Brute-force QP reference: enumerates active subsets of the inequality
// rows, solves each equality-constrained least-squares problem exactly, and
// returns the best feasible KKT point.  Exponential; keep rows small.
struct BruteForceResult {
  VecX x;
  bool feasible = false;
  double cost = 0.0;
};
BruteForceResult brute_force_qp(const QpProblem& problem, double tol = 1e-9);

// KKT residual of a candidate QP solution (max over stationarity, primal
// feasibility violation, dual feasibility, complementarity).
double kkt_residual(const QpProblem& problem, const VecX& x, double active_tol = 1e-7);

}  // namespace oracle
}  // namespace seabal

#endif  // SEABAL_TESTS_SUPPORT_ORACLES_HPP_
