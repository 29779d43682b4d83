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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "data/dataset.h"
#include "data/metrics.h"
#include "fusion/experiment.h"
#include "fusion/fusion.h"
#include "fusion/pipeline.h"
#include "nn/train.h"
#include "test_util.h"

namespace privfusion::fusion {
namespace {

using ::privfusion::testing::RandomModel;
using ::privfusion::testing::RandomPermutations;
using ::privfusion::testing::UniformMatrix;

double MaxLogitGap(const nn::MlpModel& a, const nn::MlpModel& b, const Matrix& x) {
  return (nn::Forward(a, x) - nn::Forward(b, x)).cwiseAbs().maxCoeff();
}

TEST(ApplyPermutationsTest, IdentityIsBitExact) {
  const auto m = RandomModel({6, 5, 4, 3}, 1, /*use_bias=*/true);
  EXPECT_TRUE(nn::BitIdentical(ApplyPermutations(m, matching::PermutationSet::Identity(m.spec.layer_sizes)), m));
}

TEST(ApplyPermutationsTest, PreservesFunction) {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const auto m = RandomModel({8, 7, 6, 5, 3}, seed, /*use_bias=*/seed % 2 == 0);
    const auto p = ApplyPermutations(m, RandomPermutations(m.spec.layer_sizes, 100 + seed));
    EXPECT_LE(MaxLogitGap(m, p, UniformMatrix(100, 8, 200 + seed, -2, 2)), 1e-9);
  }
}

TEST(ApplyPermutationsTest, InverseRestoresModel) {
  const auto m = RandomModel({6, 5, 4, 3}, 3, /*use_bias=*/true);
  const auto pi = RandomPermutations(m.spec.layer_sizes, 4);
  EXPECT_TRUE(nn::BitIdentical(ApplyPermutations(ApplyPermutations(m, pi), pi.Inverse()), m));
}

TEST(ApplyPermutationsTest, MovesRowsColumnsAndBiases) {
  const auto m = RandomModel({3, 4, 2}, 5, /*use_bias=*/true);
  matching::PermutationSet pi{{{2, 0, 3, 1}}};
  const auto p = ApplyPermutations(m, pi);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(p.weights[0].row(i), m.weights[0].row(pi.perms[0][i]));
    EXPECT_EQ(p.weights[1].col(i), m.weights[1].col(pi.perms[0][i]));
    EXPECT_EQ(p.biases[0](i), m.biases[0](pi.perms[0][i]));
  }
  EXPECT_EQ(p.biases[1], m.biases[1]);
}

TEST(ApplyPermutationsTest, ShapeMismatch) {
  const auto m = RandomModel({3, 4, 2}, 5);
  EXPECT_PF_ERROR(ApplyPermutations(m, matching::PermutationSet{{{0, 1, 2}}}),
                  ErrorCode::kDimensionMismatch);
}

TEST(PfaTest, TestModeIsIdentity) {
  const auto m = RandomModel({5, 4, 3}, 1);
  EXPECT_TRUE(nn::BitIdentical(PfaTransform(m, ldp::PrivacyBudget::TestMode(), ldp::NoiseSpec{1}), m));
}

TEST(PfaTest, RawFilterOutputInUnitInterval) {
  const auto m = RandomModel({20, 10, 6}, 2);
  PfaOptions raw;
  raw.sfu_rescale = false;
  const auto out = PfaTransform(m, ldp::PrivacyBudget{1, 1, 1}, ldp::NoiseSpec{3}, raw);
  for (const Matrix& w : out.weights) {
    EXPECT_GE(w.minCoeff(), 0.0);
    EXPECT_LT(w.maxCoeff(), 1.0);
  }
}

TEST(PfaTest, RescaledOutputStaysInLayerRangeAndIsDeterministic) {
  const auto m = RandomModel({20, 10, 6}, 2);
  const ldp::PrivacyBudget b{1, 1, 1};
  const auto out = PfaTransform(m, b, ldp::NoiseSpec{3});
  for (size_t p = 0; p < 2; ++p) {
    EXPECT_GE(out.weights[p].minCoeff(), m.weights[p].minCoeff());
    EXPECT_LE(out.weights[p].maxCoeff(), m.weights[p].maxCoeff());
  }
  EXPECT_TRUE(nn::BitIdentical(out, PfaTransform(m, b, ldp::NoiseSpec{3})));
}

TEST(PfaTest, NoFilterAddsCalibratedNoise) {
  const auto m = nn::MlpModel::Zeros(nn::MlpSpec{{200, 100, 2}});
  PfaOptions opts;
  opts.sfu_enabled = false;
  opts.sensitivity = ldp::Sensitivity::Fixed(1.0);
  const auto out = PfaTransform(m, ldp::PrivacyBudget{1, 1, 1}, ldp::NoiseSpec{4}, opts);
  const auto mo = ldp::MomentsOf(out.weights[0]);
  EXPECT_NEAR(mo.stddev, ldp::GaussianSigma(1, 1e-5, 1), 0.05 * ldp::GaussianSigma(1, 1e-5, 1));
}

nn::MlpModel Scalar(double w) {
  nn::MlpModel m = nn::MlpModel::Zeros(nn::MlpSpec{{1, 1, 1}});
  m.weights[0](0, 0) = w;
  m.weights[1](0, 0) = w;
  return m;
}

TEST(FuseWeightsTest, Examples) {
  const auto a = Scalar(2);
  const auto b = Scalar(4);
  EXPECT_EQ(FuseWeights(a, b, 0.5, FusionRule::kConvex).weights[0](0, 0), 3.0);
  EXPECT_EQ(FuseWeights(a, b, 0.5, FusionRule::kHalved).weights[0](0, 0), 1.5);
  const auto x = RandomModel({5, 4, 3}, 1, true);
  const auto y = RandomModel({5, 4, 3}, 2, true);
  EXPECT_TRUE(nn::BitIdentical(FuseWeights(x, y, 1.0), x));
  EXPECT_TRUE(nn::BitIdentical(FuseWeights(x, y, 0.0), y));
}

TEST(FuseWeightsTest, SymmetricUnderSwap) {
  const auto x = RandomModel({5, 4, 3}, 1, true);
  const auto y = RandomModel({5, 4, 3}, 2, true);
  for (double alpha : {0.1, 0.25, 0.7}) {
    const auto f = FuseWeights(x, y, alpha);
    const auto g = FuseWeights(y, x, 1 - alpha);
    for (size_t p = 0; p < 2; ++p) {
      EXPECT_LT((f.weights[p] - g.weights[p]).cwiseAbs().maxCoeff(), 1e-15);
      EXPECT_LT((f.biases[p] - g.biases[p]).cwiseAbs().maxCoeff(), 1e-15);
    }
  }
}

TEST(FuseWeightsTest, RejectsMismatchedArchitecturesAndBadAlpha) {
  EXPECT_PF_ERROR(FuseWeights(RandomModel({5, 4, 3}, 1), RandomModel({5, 3, 3}, 1), 0.5),
                  ErrorCode::kArchMismatch);
  EXPECT_PF_ERROR(FuseWeights(Scalar(1), Scalar(2), 1.5), ErrorCode::kInvalidArgument);
}

TEST(FusionRuleTest, Names) {
  EXPECT_EQ(ParseFusionRule("convex"), FusionRule::kConvex);
  EXPECT_EQ(ParseFusionRule("halved"), FusionRule::kHalved);
  EXPECT_EQ(FusionRuleName(FusionRule::kHalved), "halved");
  EXPECT_PF_ERROR(ParseFusionRule("mean"), ErrorCode::kInvalidArgument);
}

// A small trained model on well-separated synthetic blobs.
struct Trained {
  data::LabeledDataset train;
  data::LabeledDataset test;
  nn::MlpModel model;
  nn::MlpModel other;
};

const Trained& Shared() {
  static const Trained t = [] {
    Trained out;
    const auto all = data::SynthBlobs(4, 150, 12, 0.25, 21);
    std::tie(out.train, out.test) = data::HoldoutSplit(all, 0.3, 22);
    nn::TrainConfig cfg;
    cfg.epochs = 15;
    cfg.seed = 23;
    out.model = nn::TrainSgd(nn::MlpSpec{{12, 10, 8, 4}}, out.train, cfg);
    cfg.seed = 24;
    out.other = nn::TrainSgd(nn::MlpSpec{{12, 10, 8, 4}}, out.train, cfg);
    return out;
  }();
  return t;
}

TEST(AlphaSweepTest, IdenticalModelsGiveConstantAccuracy) {
  const auto& f = Shared();
  const FusionReport r = AlphaSweep(f.model, f.model, f.test, FusionConfig{});
  ASSERT_EQ(r.points.size(), 11u);
  for (const auto& p : r.points) EXPECT_EQ(p.metrics.acc, r.points[0].metrics.acc);
  EXPECT_LE(r.top3_avg, r.best().metrics.acc);
  const FusionReport va = VanillaAverageBaseline(f.model, f.model, f.test, FusionConfig{});
  EXPECT_EQ(va.ToCsv(), r.ToCsv());
}

TEST(AlphaSweepTest, ReportShape) {
  const auto& f = Shared();
  const FusionReport r = AlphaSweep(f.model, f.other, f.test, FusionConfig{});
  const std::string csv = r.ToCsv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "alpha,acc,ma_f1,w_f1,ma_rec,w_rec,ma_prec,w_prec");
  EXPECT_NE(csv.find("top3_avg"), std::string::npos);
  EXPECT_LE(r.top3_avg, r.best().metrics.acc);
  std::vector<double> accs;
  for (const auto& p : r.points) accs.push_back(p.metrics.acc);
  std::sort(accs.rbegin(), accs.rend());
  EXPECT_DOUBLE_EQ(r.top3_avg, (accs[0] + accs[1] + accs[2]) / 3);
  EXPECT_EQ(r.best().metrics.acc, accs[0]);
  const Json j = r.ToJson();
  EXPECT_EQ(j["points"].size(), 11u);
  EXPECT_EQ(j["best"]["acc"], accs[0]);
}

TEST(SummarizeTest, TiesKeepEarliestAlpha) {
  std::vector<AlphaPoint> pts(4);
  for (int i = 0; i < 4; ++i) pts[i].alpha = i * 0.25;
  pts[1].metrics.acc = 0.9;
  pts[3].metrics.acc = 0.9;
  pts[0].metrics.acc = 0.3;
  const FusionReport r = Summarize(pts);
  EXPECT_EQ(r.best_index, 1u);
  EXPECT_DOUBLE_EQ(r.top3_avg, (0.9 + 0.9 + 0.3) / 3);
}

TEST(VanillaAverageTest, ShuffledCloneMidpointFallsBelowEndpoints) {
  const auto& f = Shared();
  const auto shuffled = ApplyPermutations(f.model, RandomPermutations(f.model.spec.layer_sizes, 31));
  FusionConfig cfg;
  cfg.alphas = {0.0, 0.5, 1.0};
  const FusionReport va = VanillaAverageBaseline(f.model, shuffled, f.test, cfg);
  EXPECT_LT(va.points[1].metrics.acc, va.points[0].metrics.acc);
  EXPECT_LT(va.points[1].metrics.acc, va.points[2].metrics.acc);
}

TEST(EnsembleTest, SingleModelEqualsEvaluate) {
  const auto& f = Shared();
  const auto e = PredictionEnsembleBaseline({f.model}, f.test);
  EXPECT_EQ(e.acc, data::Evaluate(f.model, f.test).acc);
  EXPECT_EQ(e.ma_f1, data::Evaluate(f.model, f.test).ma_f1);
}

TEST(EnsembleTest, ConfidentModelsCoverEachOther) {
  data::LabeledDataset d;
  d.inputs = Matrix(2, 2);
  d.inputs << 1, 0, 0, 1;
  d.labels = {0, 1};
  d.class_count = 2;
  nn::MlpModel m1 = nn::MlpModel::Zeros(nn::MlpSpec{{2, 2, 2}});
  m1.weights[0] = Matrix::Identity(2, 2);
  nn::MlpModel m2 = m1;
  // m1: sure and right on sample 0, mildly wrong on sample 1; m2 the mirror image.
  m1.weights[1] << 10, 0.5, 0, 0;
  m2.weights[1] << 0, 0, 0.5, 10;
  EXPECT_EQ(data::Evaluate(m1, d).acc, 0.5);
  EXPECT_EQ(data::Evaluate(m2, d).acc, 0.5);
  EXPECT_EQ(PredictionEnsembleBaseline({m1, m2}, d).acc, 1.0);
}

TEST(FusionConfigTest, JsonRoundTripAndValidation) {
  FusionConfig c;
  c.alphas = {0.2, 0.8};
  c.rule = FusionRule::kHalved;
  c.pfa_enabled = false;
  c.pfa.sfu_rescale = false;
  c.pfa.sensitivity = ldp::Sensitivity::Fixed(0.5);
  const FusionConfig back = FusionConfigFromJson(FusionConfigToJson(c));
  EXPECT_EQ(back.alphas, c.alphas);
  EXPECT_EQ(back.rule, FusionRule::kHalved);
  EXPECT_FALSE(back.pfa_enabled);
  EXPECT_FALSE(back.pfa.sfu_rescale);
  EXPECT_EQ(back.pfa.sensitivity.mode, ldp::SensitivityMode::kFixed);
  c.alphas = {1.2};
  EXPECT_PF_ERROR(c.Validate(), ErrorCode::kInvalidArgument);
  EXPECT_EQ(FusionConfig::DefaultAlphas().size(), 11u);
}

PipelineConfig TestModeConfig() {
  PipelineConfig c;
  c.budget = ldp::PrivacyBudget::TestMode();
  return c;
}

TEST(PipelineTest, PermutedCloneRecoversAccuracyAtEveryAlpha) {
  const auto& f = Shared();
  const auto clone = ApplyPermutations(f.model, RandomPermutations(f.model.spec.layer_sizes, 41));
  const Matrix probe = data::StratifiedSample(f.train, 40, 3).inputs;
  const PipelineResult r = RunOfflinePipeline(f.model, clone, probe, TestModeConfig(),
                                              ldp::NoiseSpec{1}, ldp::NoiseSpec{2}, &f.test);
  EXPECT_EQ(r.permutation_agreement, 1.0);
  EXPECT_TRUE(nn::BitIdentical(r.responder_operand, f.model));
  const double base = data::Evaluate(f.model, f.test).acc;
  for (const auto& p : r.report->points) EXPECT_EQ(p.metrics.acc, base) << "alpha " << p.alpha;
  const FusionReport va = VanillaAverageBaseline(f.model, clone, f.test, FusionConfig{});
  EXPECT_LT(va.points[5].metrics.acc, base);
}

TEST(PipelineTest, DeterministicUnderPrivacy) {
  const auto& f = Shared();
  const Matrix probe = data::StratifiedSample(f.train, 40, 3).inputs;
  PipelineConfig c;
  c.budget = ldp::PrivacyBudget{0.1, 0.01, 0.1};
  const auto r1 = RunOfflinePipeline(f.model, f.other, probe, c, ldp::NoiseSpec{5}, ldp::NoiseSpec{6});
  const auto r2 = RunOfflinePipeline(f.model, f.other, probe, c, ldp::NoiseSpec{5}, ldp::NoiseSpec{6});
  EXPECT_TRUE(nn::BitIdentical(r1.fused, r2.fused));
  const auto r3 = RunOfflinePipeline(f.model, f.other, probe, c, ldp::NoiseSpec{5}, ldp::NoiseSpec{7});
  EXPECT_FALSE(nn::BitIdentical(r1.fused, r3.fused));
  EXPECT_FALSE(r1.report.has_value());
}

TEST(PipelineTest, ArchitectureMismatch) {
  const auto& f = Shared();
  EXPECT_PF_ERROR(RunOfflinePipeline(f.model, RandomModel({12, 9, 8, 4}, 1), f.test.inputs,
                                     TestModeConfig(), {}, {}),
                  ErrorCode::kArchMismatch);
}

TEST(PipelineConfigTest, JsonRoundTrip) {
  PipelineConfig c;
  c.budget = ldp::PrivacyBudget{0.01, 0.1, 0.1};
  c.fixed_alpha = 0.3;
  c.perturb.sample_count = 4;
  c.graph.mean_free = true;
  c.solver.outer_rounds = 4;
  const PipelineConfig back = PipelineConfigFromJson(PipelineConfigToJson(c));
  EXPECT_EQ(back.budget.eps_a, 0.01);
  EXPECT_EQ(back.fixed_alpha, 0.3);
  EXPECT_EQ(back.perturb.sample_count, 4);
  EXPECT_TRUE(back.graph.mean_free);
  EXPECT_EQ(back.solver.outer_rounds, 4);
  EXPECT_TRUE(BudgetFromJson(Json{{"test_mode", true}}).test_mode);
  EXPECT_PF_ERROR(PipelineConfigFromJson(Json{{"budget", {{"eps_a", "x"}}}}), ErrorCode::kMalformed);
}

FixtureConfig TinyFixture() {
  FixtureConfig c;
  c.data.subset = 300;
  c.data.eval_size = 100;
  c.data.input_dim = 16;
  c.data.probe_size = 30;
  c.data.spread = 0.3;
  c.spec = nn::MlpSpec{{16, 8, 8, 10}};
  c.train.epochs = 2;
  return c;
}

TEST(ExperimentTest, LoadDataShapes) {
  const DataSplit s = LoadData(TinyFixture().data, 3);
  EXPECT_EQ(s.train.size(), 300u);
  EXPECT_EQ(s.eval.size(), 100u);
  EXPECT_EQ(s.probe.size(), 30u);
  EXPECT_EQ(s.train.input_dim(), 16u);
  for (int c = 0; c < 10; ++c) EXPECT_EQ(s.probe.CountLabel(c), 3u);
}

TEST(ExperimentTest, FixtureIsDeterministic) {
  const Fixture a = BuildFixture(TinyFixture(), 4);
  const Fixture b = BuildFixture(TinyFixture(), 4);
  EXPECT_TRUE(nn::BitIdentical(a.model_a, b.model_a));
  EXPECT_TRUE(nn::BitIdentical(a.model_b, b.model_b));
  EXPECT_FALSE(nn::BitIdentical(a.model_a, a.model_b));
}

TEST(ExperimentTest, FullGridRowCount) {
  SweepConfig c;
  c.fixture = TinyFixture();
  c.pipeline.solver.outer_rounds = 2;
  const auto rows = RunSweep(c);
  EXPECT_EQ(rows.size(), 135u);
  std::set<std::tuple<double, double, double, uint64_t>> keys;
  for (const auto& r : rows) keys.insert({r.eps_a, r.eps_w, r.eps_f, r.seed});
  EXPECT_EQ(keys.size(), 135u);
  EXPECT_TRUE(std::is_sorted(rows.begin(), rows.end(), [](const SweepRow& x, const SweepRow& y) {
    return std::tie(x.eps_a, x.eps_w, x.eps_f, x.seed) < std::tie(y.eps_a, y.eps_w, y.eps_f, y.seed);
  }));
  const std::string csv = SweepCsv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "eps_a,eps_w,eps_f,seed,best_acc,best_alpha,top3_avg");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 136);
}

TEST(ExperimentTest, EmptyGridRejected) {
  SweepConfig c;
  c.fixture = TinyFixture();
  c.eps_f.clear();
  EXPECT_PF_ERROR(RunSweep(c), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace privfusion::fusion
