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

#include "graph/model_graph.h"

#include "common/error.h"

namespace privfusion::graph {

WeightRange RangeOf(const Matrix& m) {
  if (m.size() == 0) return {};
  return {m.minCoeff(), m.maxCoeff()};
}

ModelGraph BuildGraph(const nn::MlpModel& model, const Matrix& probe,
                      const GraphOptions& options) {
  Require(probe.rows() > 0, ErrorCode::kInvalidArgument, "probe set is empty");
  model.Validate();
  ModelGraph g;
  g.layer_sizes = model.spec.layer_sizes;
  nn::ActivationTrace trace = nn::RecordActivations(model, probe);
  for (auto& layer : trace.layers) {
    Matrix features = layer.transpose();
    if (options.mean_free) features.colwise() -= features.rowwise().mean();
    g.node_features.push_back(std::move(features));
  }
  for (const auto& w : model.weights) {
    g.weight_features.push_back(w);
    g.weight_range.push_back(RangeOf(w));
  }
  return g;
}

Json GraphToJson(const ModelGraph& g) {
  Json nodes = Json::array();
  for (const auto& m : g.node_features) nodes.push_back(MatrixToJson(m));
  Json weights = Json::array();
  for (const auto& m : g.weight_features) weights.push_back(MatrixToJson(m));
  Json ranges = Json::array();
  for (const auto& r : g.weight_range) ranges.push_back(Json::array({r.min, r.max}));
  return Json{{"format_version", 1},
              {"kind", "model_graph"},
              {"layer_sizes", g.layer_sizes},
              {"node_features", std::move(nodes)},
              {"weight_features", std::move(weights)},
              {"weight_range", std::move(ranges)}};
}

ModelGraph GraphFromJson(const Json& j) {
  if (Field(j, "format_version", "graph") != 1) {
    Fail(ErrorCode::kVersionMismatch, "graph: unsupported format_version");
  }
  ModelGraph g;
  g.layer_sizes = Field(j, "layer_sizes", "graph").get<std::vector<size_t>>();
  for (const auto& m : Field(j, "node_features", "graph")) {
    g.node_features.push_back(MatrixFromJson(m, "graph node_features"));
  }
  for (const auto& m : Field(j, "weight_features", "graph")) {
    g.weight_features.push_back(MatrixFromJson(m, "graph weight_features"));
  }
  for (const auto& r : Field(j, "weight_range", "graph")) {
    g.weight_range.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
  }
  return g;
}

}  // namespace privfusion::graph
