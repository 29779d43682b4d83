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

#ifndef PRIVFUSION_NN_MLP_H_
#define PRIVFUSION_NN_MLP_H_

#include <string>
#include <string_view>
#include <vector>

#include "common/matrix.h"

namespace privfusion::nn {

enum class Activation { kRelu, kTanh };

std::string_view ActivationName(Activation a);
Activation ParseActivation(std::string_view name);

struct MlpSpec {
  std::vector<size_t> layer_sizes;  // input, hidden..., output
  Activation activation = Activation::kRelu;
  bool use_bias = false;

  void Validate() const;
  size_t hidden_layer_count() const { return layer_sizes.size() - 2; }
  size_t total_neurons() const;

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

// weights[p] maps layer p to layer p + 1 and has shape
// (layer_sizes[p + 1] x layer_sizes[p]). biases is empty unless use_bias.
// The output layer has no activation (raw logits).
struct MlpModel {
  MlpSpec spec;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  void Validate() const;
  static MlpModel Zeros(const MlpSpec& spec);
};

bool BitIdentical(const MlpModel& a, const MlpModel& b);

// Post-activation values of each hidden layer, one row per probe sample.
struct ActivationTrace {
  std::vector<Matrix> layers;
};

Matrix Forward(const MlpModel& model, const Matrix& batch);
ActivationTrace RecordActivations(const MlpModel& model, const Matrix& probe);

void ApplyActivation(Activation a, Matrix& m);

// Lowest index wins ties.
std::vector<int> ArgmaxRows(const Matrix& scores);
Matrix SoftmaxRows(const Matrix& logits);

}  // namespace privfusion::nn

#endif  // PRIVFUSION_NN_MLP_H_
