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

#include <gtest/gtest.h>

#include "common/canonical.h"
#include "graph/model_graph.h"
#include "nn/mlp.h"
#include "test_util.h"

namespace privfusion::graph {
namespace {

using ::privfusion::testing::RandomModel;
using ::privfusion::testing::RandomPermutation;
using ::privfusion::testing::UniformMatrix;

TEST(BuildGraphTest, ZeroModel) {
  const auto m = nn::MlpModel::Zeros(nn::MlpSpec{{4, 3, 2, 2}});
  const ModelGraph g = BuildGraph(m, UniformMatrix(6, 4, 1));
  ASSERT_EQ(g.hidden_layer_count(), 2u);
  for (const Matrix& f : g.node_features) EXPECT_TRUE((f.array() == 0).all());
  ASSERT_EQ(g.weight_range.size(), 3u);
  for (const WeightRange& r : g.weight_range) {
    EXPECT_EQ(r.min, 0.0);
    EXPECT_EQ(r.max, 0.0);
  }
}

TEST(BuildGraphTest, FixtureShapes) {
  const ModelGraph g = BuildGraph(RandomModel({784, 32, 32, 10}, 2), UniformMatrix(200, 784, 3));
  ASSERT_EQ(g.node_features.size(), 2u);
  for (const Matrix& f : g.node_features) {
    EXPECT_EQ(f.rows(), 32);
    EXPECT_EQ(f.cols(), 200);
  }
  ASSERT_EQ(g.weight_features.size(), 3u);
  EXPECT_EQ(g.weight_features[0].rows(), 32);
  EXPECT_EQ(g.weight_features[0].cols(), 784);
  EXPECT_EQ(g.weight_features[2].rows(), 10);
}

TEST(BuildGraphTest, NodeFeaturesAreTransposedTrace) {
  const auto m = RandomModel({5, 4, 3, 2}, 4);
  const Matrix probe = UniformMatrix(7, 5, 5);
  const ModelGraph g = BuildGraph(m, probe);
  const auto trace = nn::RecordActivations(m, probe);
  for (size_t p = 0; p < 2; ++p) EXPECT_EQ(g.node_features[p], trace.layers[p].transpose());
  for (size_t p = 0; p < 3; ++p) {
    EXPECT_EQ(g.weight_features[p], m.weights[p]);
    EXPECT_EQ(g.weight_range[p].min, m.weights[p].minCoeff());
    EXPECT_EQ(g.weight_range[p].max, m.weights[p].maxCoeff());
  }
}

TEST(BuildGraphTest, MeanFreeOption) {
  const auto m = RandomModel({5, 4, 3}, 4);
  const ModelGraph g = BuildGraph(m, UniformMatrix(9, 5, 5), GraphOptions{true});
  EXPECT_LT(g.node_features[0].rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BuildGraphTest, HiddenPermutationPermutesGraphRows) {
  const auto m = RandomModel({6, 5, 4, 3}, 8);
  const Matrix probe = UniformMatrix(11, 6, 9);
  const auto pi = RandomPermutation(5, 10);
  // Neuron i of the permuted model is neuron pi[i] of the original.
  nn::MlpModel permuted = m;
  for (int i = 0; i < 5; ++i) {
    permuted.weights[0].row(i) = m.weights[0].row(pi[i]);
    permuted.weights[1].col(i) = m.weights[1].col(pi[i]);
  }
  const ModelGraph g = BuildGraph(m, probe);
  const ModelGraph gp = BuildGraph(permuted, probe);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(gp.node_features[0].row(i), g.node_features[0].row(pi[i]));
    EXPECT_EQ(gp.weight_features[0].row(i), g.weight_features[0].row(pi[i]));
  }
  EXPECT_EQ(gp.node_features[1], g.node_features[1]);
}

TEST(BuildGraphTest, EmptyProbeRejected) {
  EXPECT_PF_ERROR(BuildGraph(RandomModel({3, 2, 2}, 1), Matrix(0, 3)), ErrorCode::kInvalidArgument);
}

TEST(GraphJsonTest, RoundTrip) {
  const ModelGraph g = BuildGraph(RandomModel({5, 4, 3, 2}, 4), UniformMatrix(3, 5, 5));
  const ModelGraph back = GraphFromJson(ParseDocument(CanonicalDump(GraphToJson(g)), "graph"));
  EXPECT_EQ(back.layer_sizes, g.layer_sizes);
  ASSERT_EQ(back.node_features.size(), 2u);
  EXPECT_EQ(back.node_features[1], g.node_features[1]);
  EXPECT_EQ(back.weight_features[2], g.weight_features[2]);
  EXPECT_EQ(back.weight_range[0].min, g.weight_range[0].min);
}

}  // namespace
}  // namespace privfusion::graph
