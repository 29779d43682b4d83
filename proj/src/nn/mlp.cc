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

#include "nn/mlp.h"

#include <cmath>
#include <cstring>

#include "common/error.h"

namespace privfusion::nn {
namespace {

// Runs the network and hands every hidden post-activation to the visitor.
template <typename Visitor>
Matrix Run(const MlpModel& model, const Matrix& batch, Visitor&& on_hidden) {
  const auto& sizes = model.spec.layer_sizes;
  if (static_cast<size_t>(batch.cols()) != sizes[0]) {
    Fail(ErrorCode::kDimensionMismatch,
         "layer 0 expects " + std::to_string(sizes[0]) +
             " input columns, batch has " + std::to_string(batch.cols()));
  }
  Matrix h = batch;
  const size_t n_maps = model.weights.size();
  for (size_t p = 0; p < n_maps; ++p) {
    const Matrix& w = model.weights[p];
    if (static_cast<size_t>(w.cols()) != static_cast<size_t>(h.cols())) {
      Fail(ErrorCode::kDimensionMismatch,
           "layer " + std::to_string(p + 1) + " weight shape does not match its input");
    }
    Matrix z = h * w.transpose();
    if (!model.biases.empty()) z.rowwise() += model.biases[p].transpose();
    if (p + 1 < n_maps) {
      ApplyActivation(model.spec.activation, z);
      on_hidden(p, z);
    }
    h = std::move(z);
  }
  return h;
}

}  // namespace

std::string_view ActivationName(Activation a) {
  return a == Activation::kRelu ? "relu" : "tanh";
}

Activation ParseActivation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  Fail(ErrorCode::kInvalidArgument, "unknown activation '" + std::string(name) + "'");
}

void MlpSpec::Validate() const {
  Require(layer_sizes.size() >= 3, ErrorCode::kInvalidArgument,
          "an MLP needs an input, at least one hidden, and an output layer");
  for (size_t s : layer_sizes) {
    Require(s >= 1, ErrorCode::kInvalidArgument, "layer sizes must be >= 1");
  }
}

size_t MlpSpec::total_neurons() const {
  size_t total = 0;
  for (size_t s : layer_sizes) total += s;
  return total;
}

void MlpModel::Validate() const {
  spec.Validate();
  const auto& sizes = spec.layer_sizes;
  Require(weights.size() == sizes.size() - 1, ErrorCode::kDimensionMismatch,
          "weight matrix count does not match layer count");
  for (size_t p = 0; p < weights.size(); ++p) {
    if (static_cast<size_t>(weights[p].rows()) != sizes[p + 1] ||
        static_cast<size_t>(weights[p].cols()) != sizes[p]) {
      Fail(ErrorCode::kDimensionMismatch,
           "weights[" + std::to_string(p) + "] has shape " +
               std::to_string(weights[p].rows()) + "x" +
               std::to_string(weights[p].cols()) + ", expected " +
               std::to_string(sizes[p + 1]) + "x" + std::to_string(sizes[p]));
    }
    Require(weights[p].allFinite(), ErrorCode::kInvalidArgument,
            "weights[" + std::to_string(p) + "] has non-finite entries");
  }
  if (spec.use_bias) {
    Require(biases.size() == weights.size(), ErrorCode::kDimensionMismatch,
            "bias vector count does not match layer count");
    for (size_t p = 0; p < biases.size(); ++p) {
      Require(static_cast<size_t>(biases[p].size()) == sizes[p + 1],
              ErrorCode::kDimensionMismatch,
              "biases[" + std::to_string(p) + "] has the wrong length");
      Require(biases[p].allFinite(), ErrorCode::kInvalidArgument,
              "biases[" + std::to_string(p) + "] has non-finite entries");
    }
  } else {
    Require(biases.empty(), ErrorCode::kDimensionMismatch,
            "biases present on a model without use_bias");
  }
}

MlpModel MlpModel::Zeros(const MlpSpec& spec) {
  spec.Validate();
  MlpModel m;
  m.spec = spec;
  const auto& sizes = spec.layer_sizes;
  for (size_t p = 0; p + 1 < sizes.size(); ++p) {
    m.weights.push_back(Matrix::Zero(static_cast<Eigen::Index>(sizes[p + 1]),
                                     static_cast<Eigen::Index>(sizes[p])));
    if (spec.use_bias) {
      m.biases.push_back(Vector::Zero(static_cast<Eigen::Index>(sizes[p + 1])));
    }
  }
  return m;
}

bool BitIdentical(const MlpModel& a, const MlpModel& b) {
  if (!(a.spec == b.spec) || a.weights.size() != b.weights.size() ||
      a.biases.size() != b.biases.size()) {
    return false;
  }
  auto same = [](const auto& x, const auto& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() &&
           std::memcmp(x.data(), y.data(), sizeof(double) * static_cast<size_t>(x.size())) == 0;
  };
  for (size_t p = 0; p < a.weights.size(); ++p) {
    if (!same(a.weights[p], b.weights[p])) return false;
  }
  for (size_t p = 0; p < a.biases.size(); ++p) {
    if (!same(a.biases[p], b.biases[p])) return false;
  }
  return true;
}

void ApplyActivation(Activation a, Matrix& m) {
  if (a == Activation::kRelu) {
    m = m.cwiseMax(0.0);
  } else {
    m = m.array().tanh().matrix();
  }
}

Matrix Forward(const MlpModel& model, const Matrix& batch) {
  return Run(model, batch, [](size_t, const Matrix&) {});
}

ActivationTrace RecordActivations(const MlpModel& model, const Matrix& probe) {
  Require(probe.rows() > 0, ErrorCode::kInvalidArgument, "probe set is empty");
  ActivationTrace trace;
  Run(model, probe, [&](size_t, const Matrix& h) { trace.layers.push_back(h); });
  return trace;
}

std::vector<int> ArgmaxRows(const Matrix& scores) {
  std::vector<int> out(static_cast<size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < scores.cols(); ++k) {
      if (scores(i, k) > scores(i, best)) best = k;
    }
    out[static_cast<size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

Matrix SoftmaxRows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double peak = logits.row(i).maxCoeff();
    double total = 0;
    for (Eigen::Index k = 0; k < logits.cols(); ++k) {
      out(i, k) = std::exp(logits(i, k) - peak);
      total += out(i, k);
    }
    out.row(i) /= total;
  }
  return out;
}

}  // namespace privfusion::nn
