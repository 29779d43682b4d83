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

#include "fusion/pipeline.h"

#include "common/error.h"

namespace privfusion::fusion {

void PipelineConfig::Validate() const {
  budget.Validate();
  solver.Validate();
  fusion.Validate();
  Require(fixed_alpha >= 0 && fixed_alpha <= 1, ErrorCode::kInvalidArgument,
          "fixed_alpha outside [0, 1]");
  Require(perturb.sample_fraction > 0 && perturb.sample_fraction <= 1,
          ErrorCode::kInvalidArgument, "sample_fraction must be in (0, 1]");
  Require(perturb.sample_count >= 0, ErrorCode::kInvalidArgument,
          "sample_count must be nonnegative");
}

Json BudgetToJson(const ldp::PrivacyBudget& b) {
  return {{"eps_a", b.eps_a}, {"eps_w", b.eps_w}, {"eps_f", b.eps_f},
          {"delta", b.delta}, {"test_mode", b.test_mode}};
}

ldp::PrivacyBudget BudgetFromJson(const Json& j) {
  Require(j.is_object(), ErrorCode::kMalformed, "budget must be an object");
  ldp::PrivacyBudget b;
  try {
    b.eps_a = j.value("eps_a", b.eps_a);
    b.eps_w = j.value("eps_w", b.eps_w);
    b.eps_f = j.value("eps_f", b.eps_f);
    b.delta = j.value("delta", b.delta);
    b.test_mode = j.value("test_mode", b.test_mode);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kMalformed, std::string("budget: ") + e.what());
  }
  if (b.test_mode) b = ldp::PrivacyBudget::TestMode();
  b.Validate();
  return b;
}

Json PipelineConfigToJson(const PipelineConfig& c) {
  Json j;
  j["budget"] = BudgetToJson(c.budget);
  j["solver"] = matching::SolverConfigToJson(c.solver);
  j["fusion"] = FusionConfigToJson(c.fusion);
  j["fixed_alpha"] = c.fixed_alpha;
  j["sample_fraction"] = c.perturb.sample_fraction;
  j["sample_count"] = c.perturb.sample_count;
  if (c.perturb.node_sensitivity.mode == ldp::SensitivityMode::kRange) {
    j["node_sensitivity"] = "range";
  } else {
    j["node_sensitivity"] = c.perturb.node_sensitivity.value;
  }
  j["mean_free"] = c.graph.mean_free;
  return j;
}

PipelineConfig PipelineConfigFromJson(const Json& j) {
  Require(j.is_object(), ErrorCode::kMalformed, "pipeline config must be an object");
  PipelineConfig c;
  if (j.contains("budget")) c.budget = BudgetFromJson(j["budget"]);
  if (j.contains("solver")) c.solver = matching::SolverConfigFromJson(j["solver"]);
  if (j.contains("fusion")) c.fusion = FusionConfigFromJson(j["fusion"]);
  try {
    c.fixed_alpha = j.value("fixed_alpha", c.fixed_alpha);
    c.perturb.sample_fraction = j.value("sample_fraction", c.perturb.sample_fraction);
    c.perturb.sample_count = j.value("sample_count", c.perturb.sample_count);
    if (j.contains("node_sensitivity")) {
      const auto& s = j["node_sensitivity"];
      if (s.is_string()) {
        Require(s.get<std::string>() == "range", ErrorCode::kInvalidArgument,
                "node_sensitivity must be \"range\" or a number");
      } else {
        c.perturb.node_sensitivity = ldp::Sensitivity::Fixed(s.get<double>());
      }
    }
    c.graph.mean_free = j.value("mean_free", c.graph.mean_free);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kMalformed, std::string("pipeline config: ") + e.what());
  }
  c.Validate();
  return c;
}

LocalShare PrepareShare(const nn::MlpModel& model, const Matrix& probe,
                        const PipelineConfig& config, const ldp::NoiseSpec& noise) {
  LocalShare s;
  s.graph = graph::BuildGraph(model, probe, config.graph);
  s.shared = ldp::PerturbGraph(s.graph, config.budget, noise, config.perturb);
  return s;
}

nn::MlpModel AlignToInitiator(const nn::MlpModel& responder,
                              const matching::PermutationSet& responder_match) {
  return ApplyPermutations(responder, responder_match.Inverse());
}

nn::MlpModel ExchangeOperand(const nn::MlpModel& aligned, const PipelineConfig& config,
                             const ldp::NoiseSpec& noise) {
  if (!config.fusion.pfa_enabled) return aligned;
  return PfaTransform(aligned, config.budget, noise, config.fusion.pfa);
}

PipelineResult RunOfflinePipeline(const nn::MlpModel& initiator,
                                  const nn::MlpModel& responder, const Matrix& probe,
                                  const PipelineConfig& config,
                                  const ldp::NoiseSpec& initiator_noise,
                                  const ldp::NoiseSpec& responder_noise,
                                  const data::LabeledDataset* eval) {
  config.Validate();
  Require(initiator.spec == responder.spec, ErrorCode::kArchMismatch,
          "models have different architectures");
  const LocalShare init_share = PrepareShare(initiator, probe, config, initiator_noise);
  const LocalShare resp_share = PrepareShare(responder, probe, config, responder_noise);

  PipelineResult r;
  r.responder_match = matching::MatchModels(resp_share.graph, init_share.shared, config.solver);
  r.initiator_match = matching::MatchModels(init_share.graph, resp_share.shared, config.solver);

  const auto to_initiator = r.responder_match.permutations.Inverse();
  size_t agree = 0, total = 0;
  for (size_t h = 0; h < to_initiator.perms.size(); ++h) {
    for (size_t i = 0; i < to_initiator.perms[h].size(); ++i) {
      agree += to_initiator.perms[h][i] == r.initiator_match.permutations.perms[h][i];
      ++total;
    }
  }
  r.permutation_agreement = total ? static_cast<double>(agree) / static_cast<double>(total) : 1.0;

  r.initiator_operand = ExchangeOperand(initiator, config, initiator_noise);
  r.responder_operand = ExchangeOperand(AlignToInitiator(responder, r.responder_match.permutations),
                                        config, responder_noise);
  r.fused = FuseWeights(r.initiator_operand, r.responder_operand, config.fixed_alpha,
                        config.fusion.rule);
  if (eval != nullptr) {
    r.report = AlphaSweep(r.initiator_operand, r.responder_operand, *eval, config.fusion);
  }
  return r;
}

}  // namespace privfusion::fusion
