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

#include "matching/affinity.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "common/error.h"

namespace privfusion::matching {

Matrix PairwiseDistances(const Matrix& rows_a, const Matrix& rows_b) {
  Require(rows_a.cols() == rows_b.cols(), ErrorCode::kDimensionMismatch,
          "affinity operands have different feature dimensions (" +
              std::to_string(rows_a.cols()) + " vs " + std::to_string(rows_b.cols()) + ")");
  Matrix d(rows_a.rows(), rows_b.rows());
  for (Eigen::Index u = 0; u < rows_a.rows(); ++u) {
    for (Eigen::Index v = 0; v < rows_b.rows(); ++v) {
      d(u, v) = (rows_a.row(u) - rows_b.row(v)).norm();
    }
  }
  return d;
}

double MedianBandwidth(const Matrix& distances) {
  if (distances.size() == 0) return 1.0;
  std::vector<double> all(distances.data(), distances.data() + distances.size());
  const size_t mid = all.size() / 2;
  std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(mid), all.end());
  double median = all[mid];
  if (all.size() % 2 == 0) {
    const double lower = *std::max_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  return median > 0 ? median : 1.0;
}

Matrix GaussianKernelAffinity(const Matrix& rows_a, const Matrix& rows_b,
                              const Bandwidth& bandwidth) {
  const Matrix d = PairwiseDistances(rows_a, rows_b);
  double h = bandwidth.value;
  if (bandwidth.median) {
    h = MedianBandwidth(d);
  } else {
    Require(h > 0 && std::isfinite(h), ErrorCode::kInvalidArgument,
            "kernel bandwidth must be positive");
  }
  const double inv = 1.0 / (2.0 * h * h);
  return (-(d.array().square()) * inv).exp().matrix();
}

Matrix MaxNormalize(const Matrix& m) {
  if (m.size() == 0) return m;
  const double peak = m.maxCoeff();
  if (peak == 0) return m;
  Require(peak > 0 && std::isfinite(peak), ErrorCode::kDegenerate,
          "affinity maximum must be positive and finite");
  return m / peak;
}

Matrix MergeAffinity(const Matrix& weight_aff, const Matrix& act_aff) {
  Require(weight_aff.rows() == act_aff.rows() && weight_aff.cols() == act_aff.cols(),
          ErrorCode::kDimensionMismatch, "affinity blocks have different shapes");
  return MaxNormalize(weight_aff) + MaxNormalize(act_aff);
}

}  // namespace privfusion::matching
