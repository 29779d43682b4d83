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

#include "matching/sinkhorn.h"

#include <cmath>

#include "common/error.h"

namespace privfusion::matching {
namespace {

double MarginalResidual(const Matrix& m) {
  const double rows = (m.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double cols = (m.colwise().sum().array() - 1.0).abs().maxCoeff();
  return std::max(rows, cols);
}

}  // namespace

SinkhornResult SinkhornProject(const Matrix& nonneg, int max_iters, double tol) {
  Require(nonneg.rows() == nonneg.cols() && nonneg.rows() > 0,
          ErrorCode::kDimensionMismatch, "sinkhorn needs a nonempty square matrix");
  Require(max_iters >= 1, ErrorCode::kInvalidArgument, "sinkhorn needs iters >= 1");
  Require(nonneg.allFinite() && nonneg.minCoeff() >= 0, ErrorCode::kInvalidArgument,
          "sinkhorn input must be finite and nonnegative");
  Require(nonneg.rowwise().sum().minCoeff() > 0 && nonneg.colwise().sum().minCoeff() > 0,
          ErrorCode::kDegenerate, "sinkhorn input has an all-zero row or column");

  SinkhornResult r;
  r.plan = nonneg;
  r.residual = MarginalResidual(r.plan);
  if (r.residual <= tol) {
    r.converged = true;
    return r;
  }
  for (int it = 0; it < max_iters; ++it) {
    r.plan.array().colwise() /= r.plan.rowwise().sum().array();
    r.plan.array().rowwise() /= r.plan.colwise().sum().array();
    r.iterations = it + 1;
    r.residual = MarginalResidual(r.plan);
    if (r.residual <= tol) {
      r.converged = true;
      break;
    }
  }
  return r;
}

Matrix LiftScores(const Matrix& scores, double tau) {
  Require(tau > 0 && std::isfinite(tau), ErrorCode::kInvalidArgument,
          "temperature must be positive");
  Require(scores.allFinite(), ErrorCode::kDegenerate, "scores must be finite");
  const double peak = scores.maxCoeff();
  return ((scores.array() - peak) / tau).exp().matrix();
}

SinkhornResult SinkhornFromScores(const Matrix& scores, double tau, int max_iters,
                                  double tol) {
  return SinkhornProject(LiftScores(scores, tau), max_iters, tol);
}

double AssignmentEntropy(const Matrix& plan) {
  if (plan.rows() == 0) return 0;
  double h = 0;
  for (Eigen::Index i = 0; i < plan.size(); ++i) {
    const double p = plan.data()[i];
    if (p > 0) h -= p * std::log(p);
  }
  return h / static_cast<double>(plan.rows());
}

}  // namespace privfusion::matching
