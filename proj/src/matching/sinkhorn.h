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

#ifndef PRIVFUSION_MATCHING_SINKHORN_H_
#define PRIVFUSION_MATCHING_SINKHORN_H_

#include "common/matrix.h"

namespace privfusion::matching {

struct SinkhornResult {
  Matrix plan;
  // max over rows and columns of |sum - 1| after the last iteration
  double residual = 0;
  int iterations = 0;
  bool converged = false;
};

// Alternating row/column normalization of a nonnegative square matrix until
// every marginal is within tol of 1 or max_iters is reached. An all-zero row
// or column is reported as kDegenerate.
SinkhornResult SinkhornProject(const Matrix& nonneg, int max_iters, double tol = 1e-6);

// exp((scores - max(scores)) / tau); the shift leaves the projection unchanged.
Matrix LiftScores(const Matrix& scores, double tau);

// LiftScores followed by SinkhornProject.
SinkhornResult SinkhornFromScores(const Matrix& scores, double tau, int max_iters,
                                  double tol = 1e-6);

// Mean row entropy (nats) of a row-stochastic matrix.
double AssignmentEntropy(const Matrix& plan);

}  // namespace privfusion::matching

#endif  // PRIVFUSION_MATCHING_SINKHORN_H_
