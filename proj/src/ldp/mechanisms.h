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

#ifndef PRIVFUSION_LDP_MECHANISMS_H_
#define PRIVFUSION_LDP_MECHANISMS_H_

#include "common/matrix.h"
#include "ldp/budget.h"

namespace privfusion::ldp {

enum class SensitivityMode { kRange, kFixed };

struct Sensitivity {
  SensitivityMode mode = SensitivityMode::kRange;
  double value = 1.0;  // used by kFixed

  static Sensitivity Range() { return {}; }
  static Sensitivity Fixed(double c) { return {SensitivityMode::kFixed, c}; }
};

// L1 sensitivity used to calibrate the Laplace mechanism: max - min over all
// entries (kRange) or a fixed constant.
double FeatureSensitivity(const Matrix& features, const Sensitivity& s);

// features + i.i.d. Laplace(sensitivity / eps_a), drawn row-major by inverse
// CDF from the ("laplace", layer) stream.
Matrix LaplacePerturb(const Matrix& features, double eps_a, double sensitivity,
                      const NoiseSpec& noise, size_t layer);

double LaplaceDensity(double x, double scale);

// Gaussian-mechanism calibration: sqrt(2 ln(1.25 / delta)) * sensitivity / eps_f.
double GaussianSigma(double eps_f, double delta, double sensitivity);

// Randomized perturbation unit: weights + i.i.d. N(0, sigma^2), row-major from
// the ("rpu", layer) stream.
Matrix Rpu(const Matrix& weights, double sigma, const NoiseSpec& noise, size_t layer);

// Smoothing filter unit: max(0, erf((x - mu) / (sigma_stat * sqrt 2))).
// Every output lies in [0, 1).
Matrix Sfu(const Matrix& noisy, double mu, double sigma_stat);

// Population mean and standard deviation of all entries.
struct Moments {
  double mean = 0;
  double stddev = 0;
};
Moments MomentsOf(const Matrix& m);

}  // namespace privfusion::ldp

#endif  // PRIVFUSION_LDP_MECHANISMS_H_
