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

#include "ldp/mechanisms.h"

#include <algorithm>
#include <cmath>

#include "common/error.h"

namespace privfusion::ldp {

double FeatureSensitivity(const Matrix& features, const Sensitivity& s) {
  if (s.mode == SensitivityMode::kFixed) {
    Require(s.value >= 0 && std::isfinite(s.value), ErrorCode::kInvalidArgument,
            "fixed sensitivity must be finite and non-negative");
    return s.value;
  }
  if (features.size() == 0) return 0;
  return features.maxCoeff() - features.minCoeff();
}

Matrix LaplacePerturb(const Matrix& features, double eps_a, double sensitivity,
                      const NoiseSpec& noise, size_t layer) {
  Require(eps_a > 0 && std::isfinite(eps_a), ErrorCode::kInvalidArgument,
          "laplace mechanism needs eps_a > 0");
  Require(sensitivity >= 0 && std::isfinite(sensitivity), ErrorCode::kInvalidArgument,
          "sensitivity must be finite and non-negative");
  Matrix out = features;
  if (sensitivity == 0) return out;
  const double scale = sensitivity / eps_a;
  Rng rng = noise.Stream("laplace", layer);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] += rng.Laplace(scale);
  return out;
}

double LaplaceDensity(double x, double scale) {
  return std::exp(-std::abs(x) / scale) / (2.0 * scale);
}

double GaussianSigma(double eps_f, double delta, double sensitivity) {
  Require(eps_f > 0 && std::isfinite(eps_f), ErrorCode::kInvalidArgument,
          "gaussian mechanism needs eps_f > 0");
  Require(delta > 0 && delta < 1, ErrorCode::kInvalidArgument,
          "gaussian mechanism needs delta in (0, 1)");
  Require(sensitivity >= 0 && std::isfinite(sensitivity), ErrorCode::kInvalidArgument,
          "sensitivity must be finite and non-negative");
  return std::sqrt(2.0 * std::log(1.25 / delta)) * sensitivity / eps_f;
}

Matrix Rpu(const Matrix& weights, double sigma, const NoiseSpec& noise, size_t layer) {
  Require(sigma >= 0 && std::isfinite(sigma), ErrorCode::kInvalidArgument,
          "rpu sigma must be finite and non-negative");
  Matrix out = weights;
  if (sigma == 0) return out;
  Rng rng = noise.Stream("rpu", layer);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] += sigma * rng.Gaussian();
  return out;
}

Matrix Sfu(const Matrix& noisy, double mu, double sigma_stat) {
  Require(sigma_stat > 0 && std::isfinite(sigma_stat), ErrorCode::kInvalidArgument,
          "sfu needs a positive standard deviation");
  const double scale = 1.0 / (sigma_stat * std::sqrt(2.0));
  // erf rounds to exactly 1 beyond ~5.9; keep the range half-open.
  const double below_one = std::nextafter(1.0, 0.0);
  Matrix out(noisy.rows(), noisy.cols());
  for (Eigen::Index i = 0; i < noisy.size(); ++i) {
    const double v = std::erf((noisy.data()[i] - mu) * scale);
    out.data()[i] = std::clamp(v, 0.0, below_one);
  }
  return out;
}

Moments MomentsOf(const Matrix& m) {
  if (m.size() == 0) return {};
  const double mean = m.mean();
  const double var = (m.array() - mean).square().mean();
  return {mean, std::sqrt(var)};
}

}  // namespace privfusion::ldp
