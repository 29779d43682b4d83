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

#include "nn/train.h"

#include <cmath>
#include <numeric>

#include "common/error.h"
#include "common/rng.h"

namespace privfusion::nn {

MlpModel InitializeModel(const MlpSpec& spec, uint64_t seed) {
  MlpModel model = MlpModel::Zeros(spec);
  for (size_t p = 0; p < model.weights.size(); ++p) {
    const double bound =
        1.0 / std::sqrt(static_cast<double>(spec.layer_sizes[p]));
    Rng rng = Substream(seed, "init", p);
    Matrix& w = model.weights[p];
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      w.data()[i] = bound * (2.0 * rng.Uniform() - 1.0);
    }
    if (spec.use_bias) {
      Rng bias_rng = Substream(seed, "init-bias", p);
      for (Eigen::Index i = 0; i < model.biases[p].size(); ++i) {
        model.biases[p][i] = bound * (2.0 * bias_rng.Uniform() - 1.0);
      }
    }
  }
  return model;
}

MlpModel TrainSgd(const MlpSpec& spec, const data::LabeledDataset& data,
                  const TrainConfig& cfg) {
  spec.Validate();
  data.Validate();
  Require(cfg.epochs >= 1, ErrorCode::kInvalidArgument, "epochs must be >= 1");
  Require(cfg.batch_size >= 1 && static_cast<size_t>(cfg.batch_size) <= data.size(),
          ErrorCode::kInvalidArgument, "batch_size must lie in [1, dataset size]");
  Require(cfg.learning_rate > 0 && std::isfinite(cfg.learning_rate),
          ErrorCode::kInvalidArgument, "learning_rate must be positive");
  Require(data.input_dim() == spec.layer_sizes.front(),
          ErrorCode::kDimensionMismatch, "dataset input width does not match layer 0");
  Require(static_cast<size_t>(data.class_count) <= spec.layer_sizes.back(),
          ErrorCode::kInvalidArgument, "more classes than output neurons");

  MlpModel model = InitializeModel(spec, cfg.seed);
  const size_t n_maps = model.weights.size();
  const auto n = data.size();
  const auto batch = static_cast<size_t>(cfg.batch_size);

  std::vector<size_t> order(n);
  std::vector<Matrix> acts(n_maps + 1);  // acts[0] = input, acts[p] = layer p
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), size_t{0});
    Rng rng = Substream(cfg.seed, "shuffle", static_cast<uint64_t>(epoch));
    for (size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.UniformInt(i)]);

    for (size_t start = 0, b = 0; start < n; start += batch, ++b) {
      const size_t rows = std::min(batch, n - start);
      Matrix& x = acts[0];
      x.resize(static_cast<Eigen::Index>(rows), data.inputs.cols());
      for (size_t r = 0; r < rows; ++r) {
        x.row(static_cast<Eigen::Index>(r)) =
            data.inputs.row(static_cast<Eigen::Index>(order[start + r]));
      }
      for (size_t p = 0; p < n_maps; ++p) {
        acts[p + 1].noalias() = acts[p] * model.weights[p].transpose();
        if (spec.use_bias) acts[p + 1].rowwise() += model.biases[p].transpose();
        if (p + 1 < n_maps) ApplyActivation(spec.activation, acts[p + 1]);
      }

      Matrix delta = SoftmaxRows(acts[n_maps]);
      double loss = 0;
      for (size_t r = 0; r < rows; ++r) {
        const int label = data.labels[order[start + r]];
        const auto ri = static_cast<Eigen::Index>(r);
        loss -= std::log(std::max(delta(ri, label), 1e-300));
        delta(ri, label) -= 1.0;
      }
      if (!std::isfinite(loss) || !delta.allFinite()) {
        Fail(ErrorCode::kDivergence, "training diverged at epoch " +
                                         std::to_string(epoch) + ", batch " +
                                         std::to_string(b));
      }
      delta /= static_cast<double>(rows);

      for (size_t p = n_maps; p-- > 0;) {
        Matrix grad_w = delta.transpose() * acts[p];
        Vector grad_b;
        if (spec.use_bias) grad_b = delta.colwise().sum().transpose();
        if (p > 0) {
          Matrix back = delta * model.weights[p];
          if (spec.activation == Activation::kRelu) {
            back = back.cwiseProduct((acts[p].array() > 0.0).cast<double>().matrix());
          } else {
            back = back.cwiseProduct((1.0 - acts[p].array().square()).matrix());
          }
          delta = std::move(back);
        }
        model.weights[p] -= cfg.learning_rate * grad_w;
        if (spec.use_bias) model.biases[p] -= cfg.learning_rate * grad_b;
      }
    }
  }
  for (const auto& w : model.weights) {
    Require(w.allFinite(), ErrorCode::kDivergence, "trained weights are not finite");
  }
  return model;
}

}  // namespace privfusion::nn
