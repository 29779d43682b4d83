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

#include "nn/model_io.h"

#include "common/error.h"

namespace privfusion::nn {

Json SpecToJson(const MlpSpec& spec) {
  return Json{{"layer_sizes", spec.layer_sizes},
              {"activation", std::string(ActivationName(spec.activation))},
              {"use_bias", spec.use_bias}};
}

MlpSpec SpecFromJson(const Json& j) {
  MlpSpec spec;
  const auto& sizes = Field(j, "layer_sizes", "spec");
  const auto& act = Field(j, "activation", "spec");
  const auto& bias = Field(j, "use_bias", "spec");
  if (!sizes.is_array() || !act.is_string() || !bias.is_boolean()) {
    Fail(ErrorCode::kMalformed, "spec: mistyped field");
  }
  for (const auto& s : sizes) {
    if (!s.is_number_unsigned()) Fail(ErrorCode::kMalformed, "spec: bad layer size");
    spec.layer_sizes.push_back(s.get<size_t>());
  }
  try {
    spec.activation = ParseActivation(act.get<std::string>());
  } catch (const Error& e) {
    Fail(ErrorCode::kMalformed, e.what());
  }
  spec.use_bias = bias.get<bool>();
  try {
    spec.Validate();
  } catch (const Error& e) {
    Fail(ErrorCode::kMalformed, std::string("spec: ") + e.what());
  }
  return spec;
}

Json ModelToJson(const MlpModel& model) {
  model.Validate();
  Json weights = Json::array();
  for (const auto& w : model.weights) weights.push_back(MatrixToJson(w));
  Json doc{{"format_version", kModelFormatVersion},
           {"spec", SpecToJson(model.spec)},
           {"weights", std::move(weights)}};
  if (model.spec.use_bias) {
    Json biases = Json::array();
    for (const auto& b : model.biases) biases.push_back(VectorToJson(b));
    doc["biases"] = std::move(biases);
  }
  return doc;
}

MlpModel ModelFromJson(const Json& j) {
  const auto& version = Field(j, "format_version", "model");
  if (!version.is_number_integer()) Fail(ErrorCode::kMalformed, "model: bad format_version");
  if (version.get<int>() != kModelFormatVersion) {
    Fail(ErrorCode::kVersionMismatch,
         "model format_version " + std::to_string(version.get<int>()) +
             " is not supported (expected " + std::to_string(kModelFormatVersion) + ")");
  }
  MlpModel model;
  model.spec = SpecFromJson(Field(j, "spec", "model"));
  const auto& weights = Field(j, "weights", "model");
  if (!weights.is_array()) Fail(ErrorCode::kMalformed, "model: weights must be an array");
  for (const auto& w : weights) model.weights.push_back(MatrixFromJson(w, "model weights"));
  if (model.spec.use_bias) {
    const auto& biases = Field(j, "biases", "model");
    if (!biases.is_array()) Fail(ErrorCode::kMalformed, "model: biases must be an array");
    for (const auto& b : biases) model.biases.push_back(VectorFromJson(b, "model biases"));
  }
  try {
    model.Validate();
  } catch (const Error& e) {
    Fail(e.code() == ErrorCode::kDimensionMismatch ? ErrorCode::kMalformed : e.code(),
         std::string("model: ") + e.what());
  }
  return model;
}

std::string EncodeModel(const MlpModel& model) { return CanonicalDump(ModelToJson(model)); }

MlpModel DecodeModel(std::string_view text) {
  return ModelFromJson(ParseDocument(text, "model"));
}

void SaveModel(const MlpModel& model, const std::string& path) {
  WriteFile(path, EncodeModel(model) + "\n");
}

MlpModel LoadModel(const std::string& path) { return DecodeModel(ReadFile(path)); }

std::string ModelDigest(const MlpModel& model) { return Sha256Hex(EncodeModel(model)); }

std::string ArchDigest(const MlpSpec& spec) {
  return Sha256Hex(CanonicalDump(SpecToJson(spec)));
}

}  // namespace privfusion::nn
