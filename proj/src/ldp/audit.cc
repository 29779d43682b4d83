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

#include "ldp/audit.h"

#include <cmath>

#include "common/error.h"
#include "common/rng.h"

namespace privfusion::ldp {
namespace {

void RequireTrials(long trials) {
  Require(trials > 0, ErrorCode::kInvalidArgument, "trials must be positive");
}

SymbolProbabilities Frequencies(double w, double eps, int m, int d, long trials,
                                uint64_t seed) {
  // Every trial is one encoding of a single row, from its own substream so
  // the run does not depend on batching.
  long counts[3] = {0, 0, 0};
  Matrix row = Matrix::Constant(1, d, w);
  for (long t = 0; t < trials; ++t) {
    const NoiseSpec noise{SubstreamSeed(seed, "audit-trial", static_cast<uint64_t>(t))};
    const auto enc = MultiBitEncode(row, eps, m, 0.0, 1.0, noise, 0);
    ++counts[enc.symbols(0, 0) + 1];
  }
  const double n = static_cast<double>(trials);
  return {counts[0] / n, counts[1] / n, counts[2] / n};
}

Json ProbJson(const SymbolProbabilities& p) {
  return {{"minus", p.minus}, {"zero", p.zero}, {"plus", p.plus}};
}

}  // namespace

MultiBitAudit AuditMultiBit(double eps, int m, int d, long trials, uint64_t seed) {
  RequireTrials(trials);
  Require(eps > 0 && m >= 1 && d >= m, ErrorCode::kInvalidArgument,
          "audit needs eps > 0 and 1 <= m <= d");
  MultiBitAudit a;
  a.epsilon = eps;
  a.trials = trials;
  a.closed_at_max = MultiBitSymbolProbabilities(1.0, eps, m, d, 0.0, 1.0);
  a.closed_at_min = MultiBitSymbolProbabilities(0.0, eps, m, d, 0.0, 1.0);
  a.empirical_at_max = Frequencies(1.0, eps, m, d, trials, SubstreamSeed(seed, "audit-max", 0));
  a.empirical_at_min = Frequencies(0.0, eps, m, d, trials, SubstreamSeed(seed, "audit-min", 0));
  const double hi[3] = {a.empirical_at_max.minus, a.empirical_at_max.zero, a.empirical_at_max.plus};
  const double lo[3] = {a.empirical_at_min.minus, a.empirical_at_min.zero, a.empirical_at_min.plus};
  for (int s = 0; s < 3; ++s) {
    if (hi[s] > 0 && lo[s] > 0) {
      a.max_log_ratio = std::max(a.max_log_ratio, std::abs(std::log(hi[s] / lo[s])));
    } else if (hi[s] > 0 || lo[s] > 0) {
      a.max_log_ratio = INFINITY;
    }
  }
  return a;
}

LaplaceAudit AuditLaplace(double scale, long samples, uint64_t seed) {
  RequireTrials(samples);
  Require(scale > 0, ErrorCode::kInvalidArgument, "scale must be positive");
  LaplaceAudit a;
  a.scale = scale;
  a.samples = samples;
  a.expected_variance = 2 * scale * scale;
  Rng rng = Substream(seed, "audit-laplace");
  // Welford's running moments
  double mean = 0, m2 = 0;
  for (long i = 0; i < samples; ++i) {
    const double x = rng.Laplace(scale);
    const double delta = x - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (x - mean);
  }
  a.mean = mean;
  a.variance = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0;
  return a;
}

RectifierAudit AuditRectifier(double w, double eps, int m, int d, double w_min, double w_max,
                              long trials, uint64_t seed) {
  RequireTrials(trials);
  Require(trials > 1, ErrorCode::kInvalidArgument, "rectifier audit needs at least two trials");
  RectifierAudit a;
  a.true_value = w;
  a.trials = trials;
  const Matrix row = Matrix::Constant(1, d, w);
  double mean = 0, m2 = 0;
  for (long t = 0; t < trials; ++t) {
    const NoiseSpec noise{SubstreamSeed(seed, "audit-rectifier", static_cast<uint64_t>(t))};
    const double x = MultiBitRectify(MultiBitEncode(row, eps, m, w_min, w_max, noise, 0))(0, 0);
    const double delta = x - mean;
    mean += delta / static_cast<double>(t + 1);
    m2 += delta * (x - mean);
  }
  a.mean = mean;
  a.standard_error = std::sqrt(m2 / static_cast<double>(trials - 1) / static_cast<double>(trials));
  return a;
}

Json ToJson(const MultiBitAudit& a) {
  return {{"mechanism", "multibit"}, {"epsilon", a.epsilon}, {"trials", a.trials},
          {"closed_at_max", ProbJson(a.closed_at_max)},
          {"empirical_at_max", ProbJson(a.empirical_at_max)},
          {"closed_at_min", ProbJson(a.closed_at_min)},
          {"empirical_at_min", ProbJson(a.empirical_at_min)},
          {"max_log_ratio", std::isfinite(a.max_log_ratio) ? Json(a.max_log_ratio) : Json("inf")}};
}

Json ToJson(const LaplaceAudit& a) {
  return {{"mechanism", "laplace"}, {"scale", a.scale}, {"samples", a.samples},
          {"mean", a.mean}, {"variance", a.variance},
          {"expected_variance", a.expected_variance}};
}

Json ToJson(const RectifierAudit& a) {
  return {{"mechanism", "rectifier"}, {"true_value", a.true_value}, {"mean", a.mean},
          {"standard_error", a.standard_error}, {"trials", a.trials}};
}

}  // namespace privfusion::ldp
