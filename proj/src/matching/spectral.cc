// Copyright 2026 The PrivFusion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "matching/spectral.h"

#include <cmath>

#include "common/error.h"
#include "matching/affinity.h"

namespace privfusion::matching {

SpectralResult SpectralRelax(const Matrix& op, Eigen::Index rows, Eigen::Index cols,
                             int power_iters, double tol) {
  const Eigen::Index n = rows * cols;
  Require(rows > 0 && cols > 0 && op.rows() == n && op.cols() == n,
          ErrorCode::kDimensionMismatch, "spectral operator must be (rows*cols) square");
  Require(power_iters >= 1, ErrorCode::kInvalidArgument, "power_iters must be >= 1");
  Require(op.allFinite(), ErrorCode::kDegenerate, "spectral operator must be finite");

  SpectralResult r;
  Vector v = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  for (int it = 0; it < power_iters; ++it) {
    Vector next = (op * v).cwiseMax(0.0);
    const double norm = next.norm();
    Require(norm > 0, ErrorCode::kDegenerate, "power iteration collapsed to zero");
    next /= norm;
    r.residual = (next - v).norm();
    r.iterations = it + 1;
    v = next;
    if (r.residual < tol) {
      r.converged = true;
      break;
    }
  }
  r.principal = v;
  r.soft = Eigen::Map<const Matrix>(v.data(), rows, cols);
  return r;
}

Matrix PairwiseOperator(const Matrix& merged, const Matrix& dist_local,
                        const Matrix& dist_remote) {
  const Eigen::Index n = merged.rows();
  Require(merged.cols() == n && dist_local.rows() == n && dist_local.cols() == n &&
              dist_remote.rows() == n && dist_remote.cols() == n,
          ErrorCode::kDimensionMismatch, "pairwise operator inputs must be n x n");
  Matrix both(n, 2 * n);
  both << dist_local, dist_remote;
  const double h = MedianBandwidth(both);
  const double inv = 1.0 / (2.0 * h * h);
  Matrix op = Matrix::Zero(n * n, n * n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const Eigen::Index i = a * n + b;
      op(i, i) = merged(a, b);
      for (Eigen::Index a2 = 0; a2 < n; ++a2) {
        if (a2 == a) continue;
        for (Eigen::Index b2 = 0; b2 < n; ++b2) {
          if (b2 == b) continue;
          const double diff = dist_local(a, a2) - dist_remote(b, b2);
          op(i, a2 * n + b2) = std::exp(-diff * diff * inv);
        }
      }
    }
  }
  return op;
}

}  // namespace privfusion::matching
