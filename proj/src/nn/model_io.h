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

#ifndef PRIVFUSION_NN_MODEL_IO_H_
#define PRIVFUSION_NN_MODEL_IO_H_

#include <string>

#include "common/canonical.h"
#include "nn/mlp.h"

namespace privfusion::nn {

inline constexpr int kModelFormatVersion = 1;

// {"format_version": 1,
//  "spec": {"layer_sizes": [...], "activation": "relu"|"tanh", "use_bias": b},
//  "weights": [matrix...], "biases": [[...]...]   (biases only if use_bias)}
Json SpecToJson(const MlpSpec& spec);
MlpSpec SpecFromJson(const Json& j);
Json ModelToJson(const MlpModel& model);
MlpModel ModelFromJson(const Json& j);

std::string EncodeModel(const MlpModel& model);
MlpModel DecodeModel(std::string_view text);

void SaveModel(const MlpModel& model, const std::string& path);
MlpModel LoadModel(const std::string& path);

// SHA-256 (hex) of the canonical model document.
std::string ModelDigest(const MlpModel& model);
// SHA-256 (hex) of the canonical spec document.
std::string ArchDigest(const MlpSpec& spec);

}  // namespace privfusion::nn

#endif  // PRIVFUSION_NN_MODEL_IO_H_
