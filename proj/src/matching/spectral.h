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

#ifndef PRIVFUSION_MATCHING_SPECTRAL_H_
#define PRIVFUSION_MATCHING_SPECTRAL_H_

#include "common/matrix.h"

namespace privfusion::matching {

struct SpectralResult {
  Vector principal;  // unit norm, nonnegative
  Matrix soft;       // principal reshaped row-major to rows x cols
  double residual = 0;  // ||v_k - v_{k-1}|| at the last step
  int iterations = 0;
  bool converged = false;
};

// Power iteration on a square nonnegative operator of size (rows*cols)^2,
// starting from the uniform unit vector. Every step clamps negatives to zero
// and renormalizes.
SpectralResult SpectralRelax(const Matrix& op, Eigen::Index rows, Eigen::Index cols,
                             int power_iters, double tol);

// Pairwise-consistency operator for one layer: the diagonal holds the merged
// affinity of each candidate pair (a, b), and entry ((a,b),(a',b')) with a != a'
// and b != b' is exp(-(da(a,a') - db(b,b'))^2 / (2 h^2)) where da, db are the
// intra-model distance matrices and h is their median scale.
Matrix PairwiseOperator(const Matrix& merged, const Matrix& dist_local,
                        const Matrix& dist_remote);

}  // namespace privfusion::matching

#endif  // PRIVFUSION_MATCHING_SPECTRAL_H_
