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

#ifndef PRIVFUSION_LDP_PERTURB_H_
#define PRIVFUSION_LDP_PERTURB_H_

#include <optional>
#include <vector>

#include "common/matrix.h"
#include "graph/model_graph.h"
#include "ldp/budget.h"
#include "ldp/mechanisms.h"
#include "ldp/multibit.h"

namespace privfusion::ldp {

// One weight layer as shared with the other party: a MultiBit encoding, or
// (test mode only) the clear matrix.
struct WeightShare {
  std::optional<MultiBitEncoding> encoding;
  Matrix clear;

  // De-biased estimate of the weight features.
  Matrix Estimate() const;
};

// Shareable, locally-private variant of a ModelGraph. Shapes mirror the
// source graph.
struct PerturbedGraph {
  std::vector<size_t> layer_sizes;
  std::vector<Matrix> node_features;
  std::vector<WeightShare> weights;
  PrivacyBudget budget;

  size_t hidden_layer_count() const { return node_features.size(); }
  void Validate() const;
};

struct PerturbOptions {
  Sensitivity node_sensitivity = Sensitivity::Range();
  double sample_fraction = 0.3;
  int sample_count = 0;  // > 0 overrides sample_fraction for every layer
};

// Laplace on every hidden layer's node features (eps_a) and MultiBit on every
// weight layer (eps_w, range = that layer's own weight_range). In test mode
// the graph passes through unchanged.
PerturbedGraph PerturbGraph(const graph::ModelGraph& g, const PrivacyBudget& budget,
                            const NoiseSpec& noise, const PerturbOptions& options = {});

}  // namespace privfusion::ldp

#endif  // PRIVFUSION_LDP_PERTURB_H_
