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

#ifndef PRIVFUSION_LDP_AUDIT_H_
#define PRIVFUSION_LDP_AUDIT_H_

#include <cstdint>

#include "common/canonical.h"
#include "ldp/multibit.h"

namespace privfusion::ldp {

// Monte Carlo frequency audits of the randomized mechanisms. Each runs on a
// single seeded stream and compares empirical statistics with closed forms.

struct MultiBitAudit {
  SymbolProbabilities closed_at_max;  // input w = w_max
  SymbolProbabilities empirical_at_max;
  SymbolProbabilities closed_at_min;  // input w = w_min
  SymbolProbabilities empirical_at_min;
  // max over output symbols of |ln P(s | w_max) / P(s | w_min)|, empirical;
  // symbols never observed under either input are skipped.
  double max_log_ratio = 0;
  double epsilon = 0;
  long trials = 0;
};

// Scalar audit over [w_min, w_max] = [0, 1] with d dimensions and m samples.
MultiBitAudit AuditMultiBit(double eps, int m, int d, long trials, uint64_t seed);

struct LaplaceAudit {
  double scale = 0;
  double mean = 0;
  double variance = 0;
  double expected_variance = 0;  // 2 * scale^2
  long samples = 0;
};

LaplaceAudit AuditLaplace(double scale, long samples, uint64_t seed);

struct RectifierAudit {
  double true_value = 0;
  double mean = 0;
  double standard_error = 0;
  long trials = 0;
};

// Encodes one row (all d entries equal to w) per trial and averages the
// rectified estimate of its first entry.
RectifierAudit AuditRectifier(double w, double eps, int m, int d, double w_min, double w_max,
                              long trials, uint64_t seed);

Json ToJson(const MultiBitAudit& a);
Json ToJson(const LaplaceAudit& a);
Json ToJson(const RectifierAudit& a);

}  // namespace privfusion::ldp

#endif  // PRIVFUSION_LDP_AUDIT_H_
