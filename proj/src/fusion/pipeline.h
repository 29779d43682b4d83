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

#ifndef PRIVFUSION_FUSION_PIPELINE_H_
#define PRIVFUSION_FUSION_PIPELINE_H_

#include <optional>

#include "common/canonical.h"
#include "data/dataset.h"
#include "fusion/fusion.h"
#include "graph/model_graph.h"
#include "ldp/budget.h"
#include "ldp/perturb.h"
#include "matching/matcher.h"
#include "nn/mlp.h"

namespace privfusion::fusion {

struct PipelineConfig {
  ldp::PrivacyBudget budget;
  matching::SolverConfig solver;
  FusionConfig fusion;
  ldp::PerturbOptions perturb;
  graph::GraphOptions graph;
  double fixed_alpha = 0.5;  // weight of the initiator's model

  void Validate() const;
};

Json PipelineConfigToJson(const PipelineConfig& c);
// Missing keys keep their defaults.
PipelineConfig PipelineConfigFromJson(const Json& j);
Json BudgetToJson(const ldp::PrivacyBudget& b);
ldp::PrivacyBudget BudgetFromJson(const Json& j);

// What one party computes before anything leaves its hands.
struct LocalShare {
  graph::ModelGraph graph;
  ldp::PerturbedGraph shared;
};

LocalShare PrepareShare(const nn::MlpModel& model, const Matrix& probe,
                        const PipelineConfig& config, const ldp::NoiseSpec& noise);

// The responder's permutation set maps responder neurons to initiator
// neurons; its inverse puts the responder model into initiator order.
nn::MlpModel AlignToInitiator(const nn::MlpModel& responder,
                              const matching::PermutationSet& responder_match);

// Operand a party contributes to the fusion: its (aligned) model after the
// adapter, or unchanged when the adapter is off.
nn::MlpModel ExchangeOperand(const nn::MlpModel& aligned, const PipelineConfig& config,
                             const ldp::NoiseSpec& noise);

struct PipelineResult {
  nn::MlpModel fused;  // at fixed_alpha
  nn::MlpModel initiator_operand;
  nn::MlpModel responder_operand;
  matching::MatchResult responder_match;
  matching::MatchResult initiator_match;
  // Fraction of hidden neurons on which the initiator's own matching agrees
  // with the responder's.
  double permutation_agreement = 0;
  std::optional<FusionReport> report;
};

// Two-party fusion with both parties simulated in one process. Both use the
// same public probe; each has its own noise seed. When eval is given the
// fusion config's alpha sweep is reported too.
PipelineResult RunOfflinePipeline(const nn::MlpModel& initiator,
                                  const nn::MlpModel& responder, const Matrix& probe,
                                  const PipelineConfig& config,
                                  const ldp::NoiseSpec& initiator_noise,
                                  const ldp::NoiseSpec& responder_noise,
                                  const data::LabeledDataset* eval = nullptr);

}  // namespace privfusion::fusion

#endif  // PRIVFUSION_FUSION_PIPELINE_H_
