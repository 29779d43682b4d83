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

#ifndef PRIVFUSION_GRAPH_MODEL_GRAPH_H_
#define PRIVFUSION_GRAPH_MODEL_GRAPH_H_

#include <utility>
#include <vector>

#include "common/canonical.h"
#include "common/matrix.h"
#include "nn/mlp.h"

namespace privfusion::graph {

struct WeightRange {
  double min = 0;
  double max = 0;
};

// Graph view of a layered network. Neurons are nodes; the layered shape is the
// adjacency, so no adjacency matrix is stored.
//
//   node_features[h]    hidden layer h + 1: (width x probe_count) activations,
//                       one row per neuron, one column per probe sample
//   weight_features[p]  incoming weight rows of layer p + 1, i.e. weights[p]
//   weight_range[p]     observed (min, max) of weight_features[p]
//
// Input and output neurons are treated as already aligned and carry no node
// features.
struct ModelGraph {
  std::vector<size_t> layer_sizes;
  std::vector<Matrix> node_features;
  std::vector<Matrix> weight_features;
  std::vector<WeightRange> weight_range;

  size_t hidden_layer_count() const { return node_features.size(); }
};

struct GraphOptions {
  bool mean_free = false;  // subtract each neuron's mean activation
};

// The probe should be stratified across classes; that is the caller's job.
ModelGraph BuildGraph(const nn::MlpModel& model, const Matrix& probe,
                      const GraphOptions& options = {});

WeightRange RangeOf(const Matrix& m);

// Debug snapshot in the canonical document format.
Json GraphToJson(const ModelGraph& g);
ModelGraph GraphFromJson(const Json& j);

}  // namespace privfusion::graph

#endif  // PRIVFUSION_GRAPH_MODEL_GRAPH_H_
