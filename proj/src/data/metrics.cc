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

#include "data/metrics.h"

#include <cstdio>

#include "common/error.h"

namespace privfusion::data {

Confusion ConfusionMatrix(const std::vector<int>& truth,
                          const std::vector<int>& predicted, int class_count) {
  Require(truth.size() == predicted.size(), ErrorCode::kDimensionMismatch,
          "prediction count does not match label count");
  const auto k = static_cast<size_t>(class_count);
  Confusion c(k, std::vector<size_t>(k, 0));
  for (size_t i = 0; i < truth.size(); ++i) {
    const auto t = static_cast<size_t>(truth[i]);
    const auto p = static_cast<size_t>(predicted[i]);
    Require(t < k && p < k, ErrorCode::kInvalidArgument, "class index out of range");
    ++c[t][p];
  }
  return c;
}

MetricReport MetricsFromConfusion(const Confusion& confusion) {
  const size_t k = confusion.size();
  std::vector<double> support(k, 0), predicted(k, 0);
  double total = 0, correct = 0;
  for (size_t t = 0; t < k; ++t) {
    for (size_t p = 0; p < k; ++p) {
      const auto v = static_cast<double>(confusion[t][p]);
      support[t] += v;
      predicted[p] += v;
      total += v;
      if (t == p) correct += v;
    }
  }
  MetricReport r;
  if (total == 0 || k == 0) return r;
  r.acc = correct / total;
  double supported_total = 0;
  for (size_t c = 0; c < k; ++c) supported_total += support[c];
  for (size_t c = 0; c < k; ++c) {
    const double tp = static_cast<double>(confusion[c][c]);
    const double prec = predicted[c] > 0 ? tp / predicted[c] : 0.0;
    const double rec = support[c] > 0 ? tp / support[c] : 0.0;
    const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    r.ma_prec += prec;
    r.ma_rec += rec;
    r.ma_f1 += f1;
    if (support[c] > 0) {
      const double w = support[c] / supported_total;
      r.w_prec += w * prec;
      r.w_rec += w * rec;
      r.w_f1 += w * f1;
    }
  }
  const auto kd = static_cast<double>(k);
  r.ma_prec /= kd;
  r.ma_rec /= kd;
  r.ma_f1 /= kd;
  return r;
}

MetricReport EvaluatePredictions(const std::vector<int>& predicted,
                                 const LabeledDataset& data) {
  return MetricsFromConfusion(ConfusionMatrix(data.labels, predicted, data.class_count));
}

MetricReport Evaluate(const nn::MlpModel& model, const LabeledDataset& data) {
  const Matrix logits = nn::Forward(model, data.inputs);
  Require(logits.cols() >= data.class_count, ErrorCode::kDimensionMismatch,
          "model has fewer outputs than the dataset has classes");
  // Output neurons past class_count are never predicted.
  return EvaluatePredictions(nn::ArgmaxRows(logits.leftCols(data.class_count)), data);
}

std::string MetricCsvHeader() { return "acc,ma_f1,w_f1,ma_rec,w_rec,ma_prec,w_prec"; }

std::string MetricCsvRow(const MetricReport& m) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f", m.acc,
                m.ma_f1, m.w_f1, m.ma_rec, m.w_rec, m.ma_prec, m.w_prec);
  return buf;
}

}  // namespace privfusion::data
