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

#include "seabal/qp.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "seabal/spatial.hpp"

namespace seabal {
namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kStepTol = 1e-11;
constexpr double kMultTol = 1e-9;

// Orthonormal basis of null(a); identity when a has no rows.
MatX null_space(const MatX& a, int dim) {
  if (a.rows() == 0) return MatX::Identity(dim, dim);
  Eigen::JacobiSVD<MatX> svd(a, Eigen::ComputeFullV);
  const VecX& s = svd.singularValues();
  const double cut = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++rank;
  return svd.matrixV().rightCols(dim - rank);
}

struct CoreResult {
  VecX z;
  std::vector<int> active;
  QpStatus status = QpStatus::Solved;
  int iterations = 0;
};

// Primal active-set iteration for min |Wz - w|^2 s.t. Cz <= b, from a
// feasible z0.  The Hessian may be singular: subproblem steps and
// multipliers use minimum-norm least squares, so the working-set matrix is
// refactorized each iteration instead of updated.
CoreResult active_set_core(const MatX& w_mat, const VecX& w_vec, const MatX& c,
                           const VecX& b, const VecX& z0,
                           const std::vector<int>& warm) {
  const int dim = static_cast<int>(z0.size());
  const int m = static_cast<int>(c.rows());
  const double feas = kFeasTol * std::max(1.0, m ? b.cwiseAbs().maxCoeff() : 0.0);

  CoreResult res;
  res.z = z0;
  std::vector<bool> in_set(m, false);
  std::vector<int> active;
  for (int i : warm) {
    if (i < 0 || i >= m || in_set[i]) continue;
    if (std::abs(c.row(i) * res.z - b(i)) <= 10 * feas) {
      in_set[i] = true;
      active.push_back(i);
    }
  }
  std::sort(active.begin(), active.end());

  const int max_iter = 50 * (m + dim) + 20;
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    MatX ca(active.size(), dim);
    VecX ba(active.size());
    for (size_t i = 0; i < active.size(); ++i) {
      ca.row(i) = c.row(active[i]);
      ba(i) = b(active[i]);
    }

    // Equality-constrained least-squares step.
    VecX p = VecX::Zero(dim);
    if (ca.rows()) p = pseudo_inverse(ca, 1e-10) * (ba - ca * res.z);
    const MatX nb = null_space(ca, dim);
    if (nb.cols()) {
      const MatX wn = w_mat * nb;
      p += nb * (pseudo_inverse(wn, 1e-10) * (w_vec - w_mat * (res.z + p)));
    }

    if (p.cwiseAbs().maxCoeff() <= kStepTol * std::max(1.0, res.z.cwiseAbs().maxCoeff())) {
      if (active.empty()) break;  // unconstrained stationary point
      const VecX grad = 2.0 * w_mat.transpose() * (w_mat * res.z - w_vec);
      const VecX mult = pseudo_inverse(ca.transpose(), 1e-10) * (-grad);
      int worst = -1;
      double worst_val = -kMultTol * std::max(1.0, grad.cwiseAbs().maxCoeff());
      for (int i = 0; i < mult.size(); ++i) {
        if (mult(i) < worst_val) {
          worst_val = mult(i);
          worst = i;
        }
      }
      if (worst < 0) break;  // all multipliers admissible: optimal
      in_set[active[worst]] = false;
      active.erase(active.begin() + worst);
      continue;
    }

    // Longest feasible step along p, blocked by the first inactive row hit.
    double alpha = 1.0;
    int blocker = -1;
    for (int i = 0; i < m; ++i) {
      if (in_set[i]) continue;
      const double speed = c.row(i) * p;
      if (speed <= kFeasTol) continue;
      const double room = b(i) - c.row(i) * res.z;
      const double a = room / speed;
      if (a < alpha - 1e-14) {
        alpha = std::max(0.0, a);
        blocker = i;
      }
    }
    res.z += alpha * p;
    if (blocker >= 0) {
      in_set[blocker] = true;
      active.insert(std::lower_bound(active.begin(), active.end(), blocker),
                    blocker);
    }
  }
  if (res.iterations >= max_iter) res.status = QpStatus::MaxIterations;
  res.active = active;
  return res;
}

}  // namespace

QpSolution QpSolver::solve(const QpProblem& problem) {
  const int d = static_cast<int>(problem.W.cols());
  const int m = static_cast<int>(problem.C.rows());
  QpSolution sol;

  // Equality elimination: x = x_eq + N z.
  VecX x_eq = VecX::Zero(d);
  MatX nb = MatX::Identity(d, d);
  if (problem.A_eq.rows()) {
    x_eq = pseudo_inverse(problem.A_eq, 1e-10) * problem.b_eq;
    if ((problem.A_eq * x_eq - problem.b_eq).cwiseAbs().maxCoeff() >
        1e-8 * std::max(1.0, problem.b_eq.cwiseAbs().maxCoeff())) {
      sol.status = QpStatus::Infeasible;
      sol.x = x_eq;
      return sol;
    }
    nb = null_space(problem.A_eq, d);
  }

  const MatX w_red = problem.W * nb;
  const VecX w_off = problem.w - problem.W * x_eq;
  MatX c_red;
  VecX b_red;
  if (m) {
    c_red = problem.C * nb;
    b_red = problem.b - problem.C * x_eq;
  } else {
    c_red = MatX::Zero(0, nb.cols());
    b_red = VecX();
  }

  if (nb.cols() == 0) {
    sol.x = x_eq;
    if (m && (problem.C * x_eq - problem.b).maxCoeff() >
                 1e-7 * std::max(1.0, problem.b.cwiseAbs().maxCoeff()))
      sol.status = QpStatus::Infeasible;
    return sol;
  }

  // Feasible start, via a phase-1 problem of the same form when z=0 fails:
  // min |s|^2 over (z, s) with Cz - s <= b, -s <= 0, started at the trivially
  // feasible s_i = max(0, -b_i).
  VecX z0 = VecX::Zero(nb.cols());
  const double feas = 1e-8 * std::max(1.0, m ? b_red.cwiseAbs().maxCoeff() : 0.0);
  if (m && (c_red * z0 - b_red).maxCoeff() > feas) {
    const int dz = static_cast<int>(nb.cols());
    MatX wp = MatX::Zero(m, dz + m);
    wp.rightCols(m).setIdentity();
    const VecX wpv = VecX::Zero(m);
    MatX cp = MatX::Zero(2 * m, dz + m);
    cp.topLeftCorner(m, dz) = c_red;
    cp.topRightCorner(m, m) = -MatX::Identity(m, m);
    cp.bottomRightCorner(m, m) = -MatX::Identity(m, m);
    VecX bp(2 * m);
    bp.head(m) = b_red;
    bp.tail(m).setZero();
    VecX v0 = VecX::Zero(dz + m);
    for (int i = 0; i < m; ++i) v0(dz + i) = std::max(0.0, -b_red(i));
    const CoreResult phase1 =
        active_set_core(wp, wpv, cp, bp, v0, std::vector<int>());
    if (phase1.z.tail(m).cwiseAbs().maxCoeff() > 1e-7) {
      sol.status = QpStatus::Infeasible;
      sol.x = x_eq + nb * phase1.z.head(dz);
      return sol;
    }
    z0 = phase1.z.head(dz);
  }

  const std::vector<int> warm =
      warm_dim_ == nb.cols() ? warm_active_ : std::vector<int>();
  const CoreResult core = active_set_core(w_red, w_off, c_red, b_red, z0, warm);
  sol.x = x_eq + nb * core.z;
  sol.status = core.status;
  sol.active_set = core.active;
  sol.iterations = core.iterations;
  warm_active_ = core.active;
  warm_dim_ = static_cast<int>(nb.cols());
  return sol;
}

void build_contact_constraints(const ContactConstraintSpec& spec, const Mat3& rot,
                               MatX* c, VecX* b) {
  const int rows = 1 + spec.n_edges + 4;
  *c = MatX::Zero(rows, 6);
  *b = VecX::Zero(rows);
  const Vec3 ex = rot.col(0), ey = rot.col(1), ez = rot.col(2);

  int r = 0;
  // Normal force floor: -f_z <= -f_min.
  c->block<1, 3>(r, 0) = -ez.transpose();
  (*b)(r++) = -spec.f_min;

  // Friction pyramid: tangential component along each edge direction bounded
  // by mu f_z.
  for (int k = 0; k < spec.n_edges; ++k) {
    const double phi = 2.0 * M_PI * k / spec.n_edges;
    const Vec3 dir = std::cos(phi) * ex + std::sin(phi) * ey;
    c->block<1, 3>(r, 0) = (dir - spec.friction * ez).transpose();
    (*b)(r++) = 0.0;
  }

  // Pressure point inside the rectangle: p_x = -tau_y / f_z in
  // [cop_x_min, cop_x_max], p_y = tau_x / f_z in [cop_y_min, cop_y_max].
  c->block<1, 3>(r, 0) = -spec.cop_x_max * ez.transpose();
  c->block<1, 3>(r, 3) = -ey.transpose();
  (*b)(r++) = 0.0;
  c->block<1, 3>(r, 0) = spec.cop_x_min * ez.transpose();
  c->block<1, 3>(r, 3) = ey.transpose();
  (*b)(r++) = 0.0;
  c->block<1, 3>(r, 0) = -spec.cop_y_max * ez.transpose();
  c->block<1, 3>(r, 3) = ex.transpose();
  (*b)(r++) = 0.0;
  c->block<1, 3>(r, 0) = spec.cop_y_min * ez.transpose();
  c->block<1, 3>(r, 3) = -ex.transpose();
  (*b)(r++) = 0.0;
}

void build_stacked_contact_constraints(const ContactConstraintSpec& spec,
                                       const std::vector<Mat3>& rots, MatX* c,
                                       VecX* b) {
  const int per = 1 + spec.n_edges + 4;
  const int nc = static_cast<int>(rots.size());
  *c = MatX::Zero(per * nc, 6 * nc);
  *b = VecX::Zero(per * nc);
  for (int k = 0; k < nc; ++k) {
    MatX ck;
    VecX bk;
    build_contact_constraints(spec, rots[k], &ck, &bk);
    c->block(per * k, 6 * k, per, 6) = ck;
    b->segment(per * k, per) = bk;
  }
}

}  // namespace seabal
