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

#ifndef SEABAL_QP_HPP_
#define SEABAL_QP_HPP_

#include <vector>

#include "seabal/types.hpp"

namespace seabal {

// min_x ||W x - w||^2  s.t.  A_eq x = b_eq,  C x <= b.
// Empty matrices (0 rows) mean the block is absent.
struct QpProblem {
  MatX W;
  VecX w;
  MatX A_eq;
  VecX b_eq;
  MatX C;
  VecX b;
};

enum class QpStatus { Solved, Infeasible, MaxIterations };

struct QpSolution {
  VecX x;
  QpStatus status = QpStatus::Solved;
  std::vector<int> active_set;  // row indices of C active at the solution
  int iterations = 0;
};

// Primal active-set solver for small dense problems.  The Hessian W^T W may
// be singular (least-squares subproblems are solved in the minimum-norm
// sense), equalities are eliminated through a QR null-space basis, and a
// feasible start is produced by a phase-1 problem of the same form.  Keeps
// the last active set as a warm start for the next call with identical
// dimensions.  Deterministic.
class QpSolver {
 public:
  QpSolution solve(const QpProblem& problem);

 private:
  std::vector<int> warm_active_;
  int warm_dim_ = -1;
};

// Wrench admissibility rows for one contact, local frame components taken
// through the contact rotation: minimum normal force, an n_edges-sided
// friction pyramid, and center-of-pressure bounds from the foot rectangle.
struct ContactConstraintSpec {
  double friction = 0.5;
  int n_edges = 4;
  double f_min = 1.0;      // N
  double cop_x_min = -0.05, cop_x_max = 0.05;  // m
  double cop_y_min = -0.05, cop_y_max = 0.05;
};

// (C, b) with C x <= b acting on one 6-vector wrench (force, torque) expressed
// in the world frame at the contact point; rot is world_R_contact.
void build_contact_constraints(const ContactConstraintSpec& spec, const Mat3& rot,
                               MatX* C, VecX* b);

// Block-diagonal stack over contacts (same spec each, per-contact rotations).
void build_stacked_contact_constraints(const ContactConstraintSpec& spec,
                                       const std::vector<Mat3>& rots, MatX* C,
                                       VecX* b);

}  // namespace seabal

#endif  // SEABAL_QP_HPP_
