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

#include "fusion/experiment.h"

#include <algorithm>
#include <cstdio>
#include <tuple>

#include "common/error.h"
#include "common/rng.h"
#include "nn/model_io.h"

namespace privfusion::fusion {
namespace {

data::PartitionPlan PlanFromJson(const Json& j) {
  data::PartitionPlan p;
  const std::string kind = j.value("kind", std::string("homogeneous"));
  if (kind == "homogeneous") {
    p.kind = data::PartitionKind::kHomogeneous;
  } else if (kind == "heterogeneous") {
    p.kind = data::PartitionKind::kHeterogeneous;
  } else {
    Fail(ErrorCode::kInvalidArgument, "unknown partition kind '" + kind + "'");
  }
  p.personalized_label = j.value("personalized_label", p.personalized_label);
  p.minority_fraction = j.value("minority_fraction", p.minority_fraction);
  return p;
}

Json PlanToJson(const data::PartitionPlan& p) {
  return {{"kind", p.kind == data::PartitionKind::kHomogeneous ? "homogeneous" : "heterogeneous"},
          {"personalized_label", p.personalized_label},
          {"minority_fraction", p.minority_fraction}};
}

template <typename F>
auto Wrap(std::string_view what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kMalformed, std::string(what) + ": " + e.what());
  }
}

}  // namespace

void DataConfig::Validate() const {
  Require(source == "synth" || source == "mnist", ErrorCode::kInvalidArgument,
          "data source must be synth or mnist");
  Require(source != "mnist" || !mnist_dir.empty(), ErrorCode::kInvalidArgument,
          "mnist source needs a directory");
  Require(subset > 0 && eval_size > 0 && probe_size > 0, ErrorCode::kInvalidArgument,
          "subset, eval_size and probe_size must be positive");
  Require(classes >= 2 && input_dim >= 1 && spread > 0, ErrorCode::kInvalidArgument,
          "synthetic data needs classes >= 2, input_dim >= 1, spread > 0");
  Require(partition.minority_fraction >= 0 && partition.minority_fraction <= 1,
          ErrorCode::kInvalidArgument, "minority_fraction outside [0, 1]");
  Require(partition.personalized_label >= 0 && partition.personalized_label < classes,
          ErrorCode::kInvalidArgument, "personalized_label outside the class range");
}

Json DataConfigToJson(const DataConfig& c) {
  return {{"source", c.source}, {"mnist_dir", c.mnist_dir}, {"subset", c.subset},
          {"eval_size", c.eval_size}, {"classes", c.classes}, {"input_dim", c.input_dim},
          {"spread", c.spread}, {"probe_size", c.probe_size},
          {"partition", PlanToJson(c.partition)}};
}

DataConfig DataConfigFromJson(const Json& j) {
  Require(j.is_object(), ErrorCode::kMalformed, "data config must be an object");
  DataConfig c;
  Wrap("data config", [&] {
    c.source = j.value("source", c.source);
    c.mnist_dir = j.value("mnist_dir", c.mnist_dir);
    c.subset = j.value("subset", c.subset);
    c.eval_size = j.value("eval_size", c.eval_size);
    c.classes = j.value("classes", c.classes);
    c.input_dim = j.value("input_dim", c.input_dim);
    c.spread = j.value("spread", c.spread);
    c.probe_size = j.value("probe_size", c.probe_size);
    if (j.contains("partition")) c.partition = PlanFromJson(j["partition"]);
    return 0;
  });
  c.Validate();
  return c;
}

DataSplit LoadData(const DataConfig& config, uint64_t seed) {
  config.Validate();
  DataSplit s;
  if (config.source == "synth") {
    const int total = config.subset + config.eval_size;
    const int per_class = (total + config.classes - 1) / config.classes;
    auto all = data::SynthBlobs(config.classes, per_class, config.input_dim, config.spread,
                                SubstreamSeed(seed, "data", 0));
    const double fraction = static_cast<double>(config.eval_size) / all.size();
    auto [train, eval] = data::HoldoutSplit(all, fraction, SubstreamSeed(seed, "eval", 0));
    s.train = data::StratifiedSample(train, static_cast<size_t>(config.subset),
                                     SubstreamSeed(seed, "subset", 0));
    s.eval = std::move(eval);
  } else {
    const std::string dir = config.mnist_dir + "/";
    auto train = data::LoadIdx(dir + "train-images-idx3-ubyte", dir + "train-labels-idx1-ubyte",
                               config.classes);
    auto test = data::LoadIdx(dir + "t10k-images-idx3-ubyte", dir + "t10k-labels-idx1-ubyte",
                              config.classes);
    s.train = data::StratifiedSample(train, static_cast<size_t>(config.subset),
                                     SubstreamSeed(seed, "subset", 0));
    s.eval = data::StratifiedSample(test, static_cast<size_t>(config.eval_size),
                                    SubstreamSeed(seed, "eval", 0));
  }
  s.probe = data::StratifiedSample(s.train, static_cast<size_t>(config.probe_size),
                                   SubstreamSeed(seed, "probe", 0));
  return s;
}

Json FixtureConfigToJson(const FixtureConfig& c) {
  return {{"data", DataConfigToJson(c.data)},
          {"spec", nn::SpecToJson(c.spec)},
          {"train", {{"epochs", c.train.epochs}, {"batch_size", c.train.batch_size},
                     {"learning_rate", c.train.learning_rate}}}};
}

FixtureConfig FixtureConfigFromJson(const Json& j) {
  Require(j.is_object(), ErrorCode::kMalformed, "fixture config must be an object");
  FixtureConfig c;
  if (j.contains("data")) c.data = DataConfigFromJson(j["data"]);
  if (j.contains("spec")) c.spec = nn::SpecFromJson(j["spec"]);
  if (j.contains("train")) {
    const auto& t = j["train"];
    Wrap("train config", [&] {
      c.train.epochs = t.value("epochs", c.train.epochs);
      c.train.batch_size = t.value("batch_size", c.train.batch_size);
      c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
      return 0;
    });
  }
  return c;
}

Fixture BuildFixture(const FixtureConfig& config, uint64_t seed) {
  config.spec.Validate();
  Fixture f;
  f.split = LoadData(config.data, seed);
  Require(f.split.train.input_dim() == config.spec.layer_sizes.front(), ErrorCode::kDimensionMismatch,
          "model input size does not match the data");
  std::tie(f.shard_a, f.shard_b) =
      data::Partition(f.split.train, config.data.partition, SubstreamSeed(seed, "partition", 0));
  nn::TrainConfig tc = config.train;
  tc.seed = SubstreamSeed(seed, "train", 0);
  f.model_a = nn::TrainSgd(config.spec, f.shard_a, tc);
  tc.seed = SubstreamSeed(seed, "train", 1);
  f.model_b = nn::TrainSgd(config.spec, f.shard_b, tc);
  return f;
}

ldp::NoiseSpec PartyNoise(uint64_t seed, int party) {
  return {SubstreamSeed(seed, "party-noise", static_cast<uint64_t>(party))};
}

void SweepConfig::Validate() const {
  Require(!eps_a.empty() && !eps_w.empty() && !eps_f.empty() && !seeds.empty(),
          ErrorCode::kInvalidArgument, "sweep grid and seed list must be nonempty");
  for (const auto* v : {&eps_a, &eps_w, &eps_f}) {
    for (double e : *v) Require(e > 0, ErrorCode::kInvalidArgument, "grid budgets must be positive");
  }
  pipeline.Validate();
}

SweepConfig SweepConfigFromJson(const Json& j) {
  Require(j.is_object(), ErrorCode::kMalformed, "sweep config must be an object");
  SweepConfig c;
  if (j.contains("fixture")) c.fixture = FixtureConfigFromJson(j["fixture"]);
  if (j.contains("pipeline")) c.pipeline = PipelineConfigFromJson(j["pipeline"]);
  Wrap("sweep config", [&] {
    if (j.contains("eps_a")) c.eps_a = j["eps_a"].get<std::vector<double>>();
    if (j.contains("eps_w")) c.eps_w = j["eps_w"].get<std::vector<double>>();
    if (j.contains("eps_f")) c.eps_f = j["eps_f"].get<std::vector<double>>();
    if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<uint64_t>>();
    return 0;
  });
  c.Validate();
  return c;
}

Json SweepConfigToJson(const SweepConfig& c) {
  return {{"fixture", FixtureConfigToJson(c.fixture)}, {"pipeline", PipelineConfigToJson(c.pipeline)},
          {"eps_a", c.eps_a}, {"eps_w", c.eps_w}, {"eps_f", c.eps_f}, {"seeds", c.seeds}};
}

std::vector<SweepRow> RunSweep(const SweepConfig& config) {
  config.Validate();
  std::vector<SweepRow> rows;
  for (uint64_t seed : config.seeds) {
    const Fixture f = BuildFixture(config.fixture, seed);
    for (double ea : config.eps_a) {
      for (double ew : config.eps_w) {
        for (double ef : config.eps_f) {
          PipelineConfig pc = config.pipeline;
          pc.budget = {ea, ew, ef, config.pipeline.budget.delta, false};
          const auto r = RunOfflinePipeline(f.model_a, f.model_b, f.split.probe.inputs, pc,
                                            PartyNoise(seed, 0), PartyNoise(seed, 1), &f.split.eval);
          rows.push_back({ea, ew, ef, seed, r.report->best().metrics.acc, r.report->best().alpha,
                          r.report->top3_avg});
        }
      }
    }
  }
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.eps_a, a.eps_w, a.eps_f, a.seed) < std::tie(b.eps_a, b.eps_w, b.eps_f, b.seed);
  });
  return rows;
}

std::string SweepCsv(const std::vector<SweepRow>& rows) {
  std::string out = "eps_a,eps_w,eps_f,seed,best_acc,best_alpha,top3_avg\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%g,%g,%g,%llu,%.6f,%.6f,%.6f\n", r.eps_a, r.eps_w, r.eps_f,
                  static_cast<unsigned long long>(r.seed), r.best_acc, r.best_alpha, r.top3_avg);
    out += buf;
  }
  return out;
}

}  // namespace privfusion::fusion
