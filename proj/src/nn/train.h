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

#ifndef PRIVFUSION_NN_TRAIN_H_
#define PRIVFUSION_NN_TRAIN_H_

#include <cstdint>

#include "data/dataset.h"
#include "nn/mlp.h"

namespace privfusion::nn {

// Plain minibatch SGD on softmax cross-entropy.
struct TrainConfig {
  int epochs = 20;
  int batch_size = 32;
  double learning_rate = 0.05;
  uint64_t seed = 0;
};

// Weights (and biases) start uniform in +-1/sqrt(fan_in) drawn from the
// ("init", layer) / ("init-bias", layer) substreams; epoch e visits samples in
// the order of a Fisher-Yates shuffle from the ("shuffle", e) substream.
// Throws kDivergence (with epoch and batch index) on a non-finite loss.
MlpModel TrainSgd(const MlpSpec& spec, const data::LabeledDataset& data,
                  const TrainConfig& cfg);

MlpModel InitializeModel(const MlpSpec& spec, uint64_t seed);

}  // namespace privfusion::nn

#endif  // PRIVFUSION_NN_TRAIN_H_
