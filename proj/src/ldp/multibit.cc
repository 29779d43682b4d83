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

#include "ldp/multibit.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "common/error.h"

namespace privfusion::ldp {

void MultiBitEncoding::Validate() const {
  Require(d >= 1 && m >= 1 && m <= d, ErrorCode::kMalformed,
          "multibit encoding needs 1 <= m <= d");
  Require(symbols.cols() == d, ErrorCode::kMalformed,
          "multibit symbol width does not match d");
  Require(eps_w > 0 && std::isfinite(eps_w), ErrorCode::kMalformed,
          "multibit encoding needs eps_w > 0");
  Require(std::isfinite(w_min) && std::isfinite(w_max), ErrorCode::kMalformed,
          "multibit range must be finite");
  for (Eigen::Index r = 0; r < symbols.rows(); ++r) {
    int nonzero = 0;
    for (Eigen::Index c = 0; c < symbols.cols(); ++c) {
      const int s = symbols(r, c);
      Require(s >= -1 && s <= 1, ErrorCode::kMalformed, "multibit symbol out of range");
      nonzero += s != 0;
    }
    Require(nonzero == m, ErrorCode::kMalformed,
            "multibit row does not have exactly m nonzero symbols");
  }
}

int DefaultSampleCount(int d, double fraction) {
  const auto m = static_cast<int>(std::lround(d * fraction));
  return std::clamp(m, 1, std::max(d, 1));
}

double MultiBitPlusProbability(double w, double eps_w, int m, double w_min,
                               double w_max) {
  const double e = std::exp(eps_w / m);
  const double t = w_max > w_min
                       ? (std::clamp(w, w_min, w_max) - w_min) / (w_max - w_min)
                       : 0.5;
  return 1.0 / (e + 1.0) + t * (e - 1.0) / (e + 1.0);
}

SymbolProbabilities MultiBitSymbolProbabilities(double w, double eps_w, int m,
                                                int d, double w_min, double w_max) {
  const double sampled = static_cast<double>(m) / d;
  const double plus = MultiBitPlusProbability(w, eps_w, m, w_min, w_max);
  return {sampled * (1.0 - plus), 1.0 - sampled, sampled * plus};
}

MultiBitEncoding MultiBitEncode(const Matrix& weight_features, double eps_w, int m,
                                double w_min, double w_max, const NoiseSpec& noise,
                                size_t layer) {
  const auto d = static_cast<int>(weight_features.cols());
  Require(eps_w > 0 && std::isfinite(eps_w), ErrorCode::kInvalidArgument,
          "multibit mechanism needs eps_w > 0");
  Require(d >= 1 && m >= 1 && m <= d, ErrorCode::kInvalidArgument,
          "multibit needs 1 <= m <= d (m=" + std::to_string(m) +
              ", d=" + std::to_string(d) + ")");
  Require(std::isfinite(w_min) && std::isfinite(w_max) && w_min <= w_max,
          ErrorCode::kInvalidArgument, "multibit range must satisfy w_min <= w_max");

  MultiBitEncoding enc;
  enc.m = m;
  enc.d = d;
  enc.w_min = w_min;
  enc.w_max = w_max;
  enc.eps_w = eps_w;
  enc.symbols = SymbolMatrix::Zero(weight_features.rows(), d);

  Rng rng = noise.Stream("multibit", layer);
  std::vector<int> dims(static_cast<size_t>(d));
  for (Eigen::Index r = 0; r < weight_features.rows(); ++r) {
    std::iota(dims.begin(), dims.end(), 0);
    for (int k = 0; k < m; ++k) {
      const auto pick = k + static_cast<int>(rng.UniformInt(static_cast<uint64_t>(d - k)));
      std::swap(dims[static_cast<size_t>(k)], dims[static_cast<size_t>(pick)]);
    }
    for (int k = 0; k < m; ++k) {
      const int c = dims[static_cast<size_t>(k)];
      const double p = MultiBitPlusProbability(weight_features(r, c), eps_w, m, w_min, w_max);
      enc.symbols(r, c) = rng.Uniform() < p ? 1 : -1;
    }
  }
  return enc;
}

Matrix MultiBitRectify(const MultiBitEncoding& enc) {
  const Eigen::Index rows = enc.symbols.rows();
  const Eigen::Index cols = enc.symbols.cols();
  if (enc.degenerate()) return Matrix::Constant(rows, cols, enc.w_min);
  const double e = std::exp(enc.eps_w / enc.m);
  const double mid = 0.5 * (enc.w_max + enc.w_min);
  const double gain = enc.d * (enc.w_max - enc.w_min) / (2.0 * enc.m) * (e + 1.0) / (e - 1.0);
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < enc.symbols.size(); ++i) {
    out.data()[i] = mid + enc.symbols.data()[i] * gain;
  }
  return out;
}

}  // namespace privfusion::ldp
