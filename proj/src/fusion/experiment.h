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

#ifndef PRIVFUSION_FUSION_EXPERIMENT_H_
#define PRIVFUSION_FUSION_EXPERIMENT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "common/canonical.h"
#include "data/dataset.h"
#include "fusion/pipeline.h"
#include "nn/mlp.h"
#include "nn/train.h"

namespace privfusion::fusion {

struct DataConfig {
  std::string source = "synth";  // "synth" or "mnist"
  std::string mnist_dir;         // holds the four standard IDX files
  int subset = 10000;            // training pool size
  int eval_size = 2000;
  int classes = 10;
  int input_dim = 784;  // synth only
  double spread = 1.2;  // synth only
  int probe_size = 200;
  data::PartitionPlan partition;

  void Validate() const;
};

Json DataConfigToJson(const DataConfig& c);
DataConfig DataConfigFromJson(const Json& j);

// Training pool, evaluation split and the public probe. Probe rows are a
// stratified sample of the training pool. Seeded substreams: "data",
// "subset", "eval", "probe".
struct DataSplit {
  data::LabeledDataset train;
  data::LabeledDataset eval;
  data::LabeledDataset probe;
};

DataSplit LoadData(const DataConfig& config, uint64_t seed);

struct FixtureConfig {
  DataConfig data;
  nn::MlpSpec spec{{784, 32, 32, 10}};
  nn::TrainConfig train;  // seed is replaced per party
};

Json FixtureConfigToJson(const FixtureConfig& c);
FixtureConfig FixtureConfigFromJson(const Json& j);

// Two models trained on the two partition shards; model A uses training
// seed SubstreamSeed(seed, "train", 0), model B index 1.
struct Fixture {
  DataSplit split;
  data::LabeledDataset shard_a;
  data::LabeledDataset shard_b;
  nn::MlpModel model_a;
  nn::MlpModel model_b;
};

Fixture BuildFixture(const FixtureConfig& config, uint64_t seed);

// Noise for the two parties of an experiment run with the given seed.
ldp::NoiseSpec PartyNoise(uint64_t seed, int party);

struct SweepConfig {
  FixtureConfig fixture;
  PipelineConfig pipeline;  // budget replaced per cell
  std::vector<double> eps_a{0.01, 0.1, 1.0};
  std::vector<double> eps_w{0.01, 0.1, 1.0};
  std::vector<double> eps_f{0.01, 0.1, 1.0};
  std::vector<uint64_t> seeds{1, 2, 3, 4, 5};

  void Validate() const;
};

SweepConfig SweepConfigFromJson(const Json& j);
Json SweepConfigToJson(const SweepConfig& c);

struct SweepRow {
  double eps_a = 0;
  double eps_w = 0;
  double eps_f = 0;
  uint64_t seed = 0;
  double best_acc = 0;
  double best_alpha = 0;
  double top3_avg = 0;
};

// Every seed trains one fixture; every cell of the grid reuses it and the
// same party noise seeds, so cells differ only in their budgets. Rows are
// sorted by (eps_a, eps_w, eps_f, seed).
std::vector<SweepRow> RunSweep(const SweepConfig& config);

// eps_a,eps_w,eps_f,seed,best_acc,best_alpha,top3_avg
std::string SweepCsv(const std::vector<SweepRow>& rows);

}  // namespace privfusion::fusion

#endif  // PRIVFUSION_FUSION_EXPERIMENT_H_
