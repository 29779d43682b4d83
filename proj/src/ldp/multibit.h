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

#ifndef PRIVFUSION_LDP_MULTIBIT_H_
#define PRIVFUSION_LDP_MULTIBIT_H_

#include <cstdint>

#include "common/matrix.h"
#include "ldp/budget.h"

namespace privfusion::ldp {

using SymbolMatrix =
    Eigen::Matrix<int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// MultiBit encoding of one layer's weight features. Each row keeps exactly
// m nonzero symbols in {-1, +1}; unsampled dimensions are 0.
struct MultiBitEncoding {
  SymbolMatrix symbols;
  int m = 1;
  int d = 1;
  double w_min = 0;
  double w_max = 0;
  double eps_w = 0;

  bool degenerate() const { return !(w_max > w_min); }
  void Validate() const;
};

// Default sampled-dimension count: max(1, round(d * fraction)), capped at d.
int DefaultSampleCount(int d, double fraction = 0.3);

// P[+1] given the feature was sampled:
//   1/(e^{eps/m} + 1) + (w - w_min)/(w_max - w_min) * (e^{eps/m} - 1)/(e^{eps/m} + 1)
// Degenerate ranges (w_max <= w_min) use the midpoint, i.e. 1/2.
double MultiBitPlusProbability(double w, double eps_w, int m, double w_min,
                               double w_max);

struct SymbolProbabilities {
  double minus = 0;
  double zero = 0;
  double plus = 0;
};
// Unconditional output distribution of a single dimension.
SymbolProbabilities MultiBitSymbolProbabilities(double w, double eps_w, int m,
                                                int d, double w_min, double w_max);

// Per row: draw m of d dimensions by partial Fisher-Yates, then for each drawn
// dimension (in draw order) one uniform u; emit +1 if u < P[+1] else -1.
// Inputs are clamped into [w_min, w_max]. Stream: ("multibit", layer).
MultiBitEncoding MultiBitEncode(const Matrix& weight_features, double eps_w, int m,
                                double w_min, double w_max, const NoiseSpec& noise,
                                size_t layer);

// Receiver-side unbiased estimate:
//   (w_max + w_min)/2 + s * d (w_max - w_min) / (2m) * (e^{eps/m} + 1)/(e^{eps/m} - 1)
// Degenerate encodings return w_min everywhere.
Matrix MultiBitRectify(const MultiBitEncoding& enc);

}  // namespace privfusion::ldp

#endif  // PRIVFUSION_LDP_MULTIBIT_H_
