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

#ifndef PRIVFUSION_DATA_METRICS_H_
#define PRIVFUSION_DATA_METRICS_H_

#include <string>
#include <vector>

#include "data/dataset.h"
#include "nn/mlp.h"

namespace privfusion::data {

// Column names match the usual classification report: accuracy plus macro
// (unweighted) and weighted (by class support) F1, recall and precision.
struct MetricReport {
  double acc = 0;
  double ma_f1 = 0;
  double w_f1 = 0;
  double ma_rec = 0;
  double w_rec = 0;
  double ma_prec = 0;
  double w_prec = 0;
};

// confusion[true][predicted].
using Confusion = std::vector<std::vector<size_t>>;

Confusion ConfusionMatrix(const std::vector<int>& truth,
                          const std::vector<int>& predicted, int class_count);

// Zero-support classes count as 0 in macro means and are left out of the
// weighted means. Precision of a never-predicted class is 0.
MetricReport MetricsFromConfusion(const Confusion& confusion);

MetricReport Evaluate(const nn::MlpModel& model, const LabeledDataset& data);
MetricReport EvaluatePredictions(const std::vector<int>& predicted,
                                 const LabeledDataset& data);

std::string MetricCsvHeader();  // acc,ma_f1,w_f1,ma_rec,w_rec,ma_prec,w_prec
std::string MetricCsvRow(const MetricReport& m);

}  // namespace privfusion::data

#endif  // PRIVFUSION_DATA_METRICS_H_
