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

#ifndef PRIVFUSION_FUSION_FUSION_H_
#define PRIVFUSION_FUSION_FUSION_H_

#include <string>
#include <string_view>
#include <vector>

#include "common/canonical.h"
#include "data/dataset.h"
#include "data/metrics.h"
#include "ldp/budget.h"
#include "ldp/mechanisms.h"
#include "matching/permutation.h"
#include "nn/mlp.h"

namespace privfusion::fusion {

// kConvex: a*W_a + (1-a)*W_b. kHalved: half of that, kept for fidelity runs;
// it shrinks every layer and with it the logits.
enum class FusionRule { kConvex, kHalved };
std::string_view FusionRuleName(FusionRule r);
FusionRule ParseFusionRule(std::string_view name);

struct PfaOptions {
  bool sfu_enabled = true;
  // Map the filter's [0, 1) output back onto the layer's original
  // [w_min, w_max] so the fused network keeps its scale.
  bool sfu_rescale = true;
  ldp::Sensitivity sensitivity = ldp::Sensitivity::Range();
};

struct FusionConfig {
  std::vector<double> alphas = DefaultAlphas();
  FusionRule rule = FusionRule::kConvex;
  bool pfa_enabled = true;
  PfaOptions pfa;

  static std::vector<double> DefaultAlphas();  // 0, 0.1, ..., 1
  void Validate() const;
};

Json FusionConfigToJson(const FusionConfig& c);
FusionConfig FusionConfigFromJson(const Json& j);

// New neuron i of hidden layer h is old neuron perms[h][i]: rows of
// weights[h], entries of biases[h] and columns of weights[h + 1] move together.
nn::MlpModel ApplyPermutations(const nn::MlpModel& model,
                               const matching::PermutationSet& perms);

// Perturbation-filter adapter. Per weight layer p the block [W_p | b_p] gets
// Gaussian noise calibrated to (eps_f, delta, sensitivity) from the ("rpu", p)
// stream, then the smoothing filter with the noisy block's own mean and
// standard deviation, then the optional rescale. Identity in test mode.
nn::MlpModel PfaTransform(const nn::MlpModel& model, const ldp::PrivacyBudget& budget,
                          const ldp::NoiseSpec& noise, const PfaOptions& options = {});

nn::MlpModel FuseWeights(const nn::MlpModel& a, const nn::MlpModel& b, double alpha,
                         FusionRule rule = FusionRule::kConvex);

struct AlphaPoint {
  double alpha = 0;
  data::MetricReport metrics;
};

struct FusionReport {
  std::vector<AlphaPoint> points;
  size_t best_index = 0;
  double top3_avg = 0;  // mean accuracy of the three best points

  const AlphaPoint& best() const { return points.at(best_index); }
  // alpha,acc,ma_f1,w_f1,ma_rec,w_rec,ma_prec,w_prec; then a "best@<alpha>" row
  // and a "top3_avg" row.
  std::string ToCsv() const;
  Json ToJson() const;
};

// Ranks by accuracy; ties keep the smaller alpha first.
FusionReport Summarize(std::vector<AlphaPoint> points);

FusionReport AlphaSweep(const nn::MlpModel& a, const nn::MlpModel& b_aligned,
                        const data::LabeledDataset& test, const FusionConfig& config);

// The same sweep on unaligned raw weights.
FusionReport VanillaAverageBaseline(const nn::MlpModel& a, const nn::MlpModel& b,
                                    const data::LabeledDataset& test,
                                    const FusionConfig& config);

// Mean of the models' softmax outputs, then argmax.
data::MetricReport PredictionEnsembleBaseline(const std::vector<nn::MlpModel>& models,
                                              const data::LabeledDataset& test);

}  // namespace privfusion::fusion

#endif  // PRIVFUSION_FUSION_FUSION_H_
