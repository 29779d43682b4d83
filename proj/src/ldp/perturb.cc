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

#include "ldp/perturb.h"

#include "common/error.h"

namespace privfusion::ldp {

Matrix WeightShare::Estimate() const {
  return encoding ? MultiBitRectify(*encoding) : clear;
}

void PerturbedGraph::Validate() const {
  Require(layer_sizes.size() >= 3, ErrorCode::kMalformed,
          "perturbed graph needs at least three layers");
  Require(node_features.size() == layer_sizes.size() - 2, ErrorCode::kMalformed,
          "perturbed graph node feature count does not match its layers");
  Require(weights.size() == layer_sizes.size() - 1, ErrorCode::kMalformed,
          "perturbed graph weight layer count does not match its layers");
  for (size_t h = 0; h < node_features.size(); ++h) {
    Require(static_cast<size_t>(node_features[h].rows()) == layer_sizes[h + 1],
            ErrorCode::kMalformed, "node feature rows do not match layer width");
    Require(node_features[h].allFinite(), ErrorCode::kMalformed,
            "node features must be finite");
  }
  for (size_t p = 0; p < weights.size(); ++p) {
    const auto rows = layer_sizes[p + 1];
    const auto cols = layer_sizes[p];
    if (weights[p].encoding) {
      weights[p].encoding->Validate();
      Require(static_cast<size_t>(weights[p].encoding->symbols.rows()) == rows &&
                  static_cast<size_t>(weights[p].encoding->d) == cols,
              ErrorCode::kMalformed, "weight encoding shape does not match layer");
    } else {
      Require(static_cast<size_t>(weights[p].clear.rows()) == rows &&
                  static_cast<size_t>(weights[p].clear.cols()) == cols,
              ErrorCode::kMalformed, "clear weight shape does not match layer");
    }
  }
}

PerturbedGraph PerturbGraph(const graph::ModelGraph& g, const PrivacyBudget& budget,
                            const NoiseSpec& noise, const PerturbOptions& options) {
  budget.Validate();
  PerturbedGraph out;
  out.layer_sizes = g.layer_sizes;
  out.budget = budget;
  if (budget.test_mode) {
    out.node_features = g.node_features;
    for (const auto& w : g.weight_features) out.weights.push_back({std::nullopt, w});
    return out;
  }
  for (size_t h = 0; h < g.node_features.size(); ++h) {
    const double sen = FeatureSensitivity(g.node_features[h], options.node_sensitivity);
    out.node_features.push_back(
        LaplacePerturb(g.node_features[h], budget.eps_a, sen, noise, h));
  }
  for (size_t p = 0; p < g.weight_features.size(); ++p) {
    const auto d = static_cast<int>(g.weight_features[p].cols());
    const int m = options.sample_count > 0 ? std::min(options.sample_count, d)
                                           : DefaultSampleCount(d, options.sample_fraction);
    out.weights.push_back(
        {MultiBitEncode(g.weight_features[p], budget.eps_w, m, g.weight_range[p].min,
                        g.weight_range[p].max, noise, p),
         Matrix()});
  }
  return out;
}

}  // namespace privfusion::ldp
