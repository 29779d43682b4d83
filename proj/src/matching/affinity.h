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

#ifndef PRIVFUSION_MATCHING_AFFINITY_H_
#define PRIVFUSION_MATCHING_AFFINITY_H_

#include "common/matrix.h"

namespace privfusion::matching {

// Kernel bandwidth: a fixed positive value, or the median of all pairwise
// distances between the two row sets (a zero median becomes 1).
struct Bandwidth {
  bool median = true;
  double value = 1.0;

  static Bandwidth Median() { return {}; }
  static Bandwidth Fixed(double h) { return {false, h}; }
};

// d[u][v] = ||a_u - b_v||, computed by direct differences so identical rows
// give exactly 0.
Matrix PairwiseDistances(const Matrix& rows_a, const Matrix& rows_b);

double MedianBandwidth(const Matrix& distances);

// out[u][v] = exp(-||a_u - b_v||^2 / (2 h^2))
Matrix GaussianKernelAffinity(const Matrix& rows_a, const Matrix& rows_b,
                              const Bandwidth& bandwidth);

// Divides by the largest entry; an all-zero (or empty) matrix passes through.
Matrix MaxNormalize(const Matrix& m);

// Layer-wise merge of the weight and activation affinities: both are
// max-normalized and added elementwise.
Matrix MergeAffinity(const Matrix& weight_aff, const Matrix& act_aff);

}  // namespace privfusion::matching

#endif  // PRIVFUSION_MATCHING_AFFINITY_H_
