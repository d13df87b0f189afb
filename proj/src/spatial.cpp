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

#include "seabal/spatial.hpp"

#include <Eigen/SVD>

namespace seabal {

MatX pseudo_inverse(const MatX& m, double rel_tol, int* rank_out) {
  if (m.rows() == 0 || m.cols() == 0) {
    if (rank_out) *rank_out = 0;
    return MatX::Zero(m.cols(), m.rows());
  }
  Eigen::JacobiSVD<MatX> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecX& sv = svd.singularValues();
  const double cutoff = rel_tol * sv(0);
  int rank = 0;
  VecX inv = VecX::Zero(sv.size());
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff && sv(i) > 0.0) {
      inv(i) = 1.0 / sv(i);
      ++rank;
    }
  }
  if (rank_out) *rank_out = rank;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace seabal
