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

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "common/canonical.h"
#include "data/dataset.h"
#include "data/metrics.h"
#include "nn/mlp.h"
#include "nn/model_io.h"
#include "nn/train.h"
#include "test_util.h"

namespace privfusion::nn {
namespace {

using ::privfusion::testing::RandomModel;
using ::privfusion::testing::UniformMatrix;

TEST(ForwardTest, ZeroWeightsGiveZeroLogits) {
  const MlpModel m = MlpModel::Zeros(MlpSpec{{5, 4, 3}});
  const Matrix logits = Forward(m, UniformMatrix(7, 5, 1, -3, 3));
  EXPECT_EQ(logits.rows(), 7);
  EXPECT_EQ(logits.cols(), 3);
  EXPECT_TRUE((logits.array() == 0).all());
}

TEST(ForwardTest, IdentityReluNetClampsNegativeHidden) {
  MlpModel m = MlpModel::Zeros(MlpSpec{{2, 2, 2}});
  m.weights[0] = Matrix::Identity(2, 2);
  m.weights[1] = Matrix::Identity(2, 2);
  Matrix x(1, 2);
  x << 1, -1;
  const ActivationTrace trace = RecordActivations(m, x);
  EXPECT_EQ(trace.layers[0](0, 0), 1.0);
  EXPECT_EQ(trace.layers[0](0, 1), 0.0);
  const Matrix logits = Forward(m, x);
  EXPECT_EQ(logits(0, 0), 1.0);
  EXPECT_EQ(logits(0, 1), 0.0);
}

TEST(ForwardTest, MatchesHandWrittenMatrixChain) {
  const MlpModel m = RandomModel({4, 3, 2}, 11);
  const Matrix x = UniformMatrix(3, 4, 12, -1, 1);
  const Matrix logits = Forward(m, x);
  for (int s = 0; s < 3; ++s) {
    double hidden[3];
    for (int j = 0; j < 3; ++j) {
      double acc = 0;
      for (int k = 0; k < 4; ++k) acc += m.weights[0](j, k) * x(s, k);
      hidden[j] = acc > 0 ? acc : 0;
    }
    for (int o = 0; o < 2; ++o) {
      double acc = 0;
      for (int j = 0; j < 3; ++j) acc += m.weights[1](o, j) * hidden[j];
      EXPECT_NEAR(logits(s, o), acc, 1e-12);
    }
  }
}

TEST(ForwardTest, BiasAndTanhAreApplied) {
  MlpModel m = RandomModel({3, 2, 2}, 5, /*use_bias=*/true);
  m.spec.activation = Activation::kTanh;
  m.biases[0] << 0.5, -0.25;
  m.biases[1] << 1.0, 2.0;
  Matrix x(1, 3);
  x << 0.2, -0.4, 0.9;
  const Matrix logits = Forward(m, x);
  for (int o = 0; o < 2; ++o) {
    double acc = m.biases[1](o);
    for (int j = 0; j < 2; ++j) {
      double pre = m.biases[0](j);
      for (int k = 0; k < 3; ++k) pre += m.weights[0](j, k) * x(0, k);
      acc += m.weights[1](o, j) * std::tanh(pre);
    }
    EXPECT_NEAR(logits(0, o), acc, 1e-12);
  }
}

TEST(ForwardTest, WrongInputWidthIsDimensionError) {
  const MlpModel m = RandomModel({4, 3, 2}, 1);
  EXPECT_PF_ERROR(Forward(m, Matrix::Zero(2, 5)), ErrorCode::kDimensionMismatch);
}

TEST(ForwardTest, ScalingOutputLayerScalesLogits) {
  MlpModel m = RandomModel({6, 5, 4, 3}, 21);
  const Matrix x = UniformMatrix(10, 6, 22);
  const Matrix base = Forward(m, x);
  m.weights.back() *= 2.5;
  const Matrix scaled = Forward(m, x);
  EXPECT_LT((scaled - 2.5 * base).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(ArgmaxRows(scaled), ArgmaxRows(base));
}

TEST(RecordActivationsTest, ZeroNetGivesZeroTrace) {
  const MlpModel m = MlpModel::Zeros(MlpSpec{{3, 4, 2, 2}});
  const ActivationTrace t = RecordActivations(m, UniformMatrix(5, 3, 2));
  ASSERT_EQ(t.layers.size(), 2u);
  for (const Matrix& l : t.layers) EXPECT_TRUE((l.array() == 0).all());
}

TEST(RecordActivationsTest, SingleProbeHasOneRow) {
  const ActivationTrace t = RecordActivations(RandomModel({3, 4, 2}, 3), UniformMatrix(1, 3, 4));
  ASSERT_EQ(t.layers.size(), 1u);
  EXPECT_EQ(t.layers[0].rows(), 1);
  EXPECT_EQ(t.layers[0].cols(), 4);
}

TEST(RecordActivationsTest, AgreesWithSingleSampleForwardChain) {
  const MlpModel m = RandomModel({4, 6, 5, 3}, 7);
  const Matrix probe = UniformMatrix(5, 4, 8);
  const ActivationTrace t = RecordActivations(m, probe);
  ASSERT_EQ(t.layers.size(), 2u);
  for (int s = 0; s < 5; ++s) {
    Matrix h = probe.row(s);
    for (size_t p = 0; p < 2; ++p) {
      h = h * m.weights[p].transpose();
      h = h.cwiseMax(0.0);
      ASSERT_EQ(t.layers[p].rows(), 5);
      EXPECT_EQ(t.layers[p].row(s), h.row(0)) << "sample " << s << " layer " << p;
    }
    const Matrix logits = Forward(m, probe.row(s));
    EXPECT_EQ(logits.row(0), (h * m.weights[2].transpose()).row(0));
  }
}

TEST(RecordActivationsTest, EmptyProbeRejected) {
  EXPECT_PF_ERROR(RecordActivations(RandomModel({3, 2, 2}, 1), Matrix(0, 3)),
                  ErrorCode::kInvalidArgument);
}

TEST(SpecTest, ValidatesShape) {
  EXPECT_PF_ERROR((MlpSpec{{3, 2}}.Validate()), ErrorCode::kInvalidArgument);
  EXPECT_PF_ERROR((MlpSpec{{3, 0, 2}}.Validate()), ErrorCode::kInvalidArgument);
  EXPECT_EQ((MlpSpec{{784, 32, 32, 10}}.total_neurons()), 858u);
}

data::LabeledDataset TwoBlobs() { return data::SynthBlobs(2, 100, 6, 0.05, 99); }

TEST(TrainTest, SameSeedIsBitIdentical) {
  const auto d = TwoBlobs();
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.seed = 17;
  const MlpSpec spec{{6, 5, 2}};
  const MlpModel a = TrainSgd(spec, d, cfg);
  const MlpModel b = TrainSgd(spec, d, cfg);
  EXPECT_TRUE(BitIdentical(a, b));
  EXPECT_EQ(EncodeModel(a), EncodeModel(b));
  cfg.seed = 18;
  EXPECT_FALSE(BitIdentical(a, TrainSgd(spec, d, cfg)));
}

TEST(TrainTest, SeparableBlobsReachHighTrainAccuracy) {
  const auto d = TwoBlobs();
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.seed = 3;
  const MlpModel m = TrainSgd(MlpSpec{{6, 8, 2}}, d, cfg);
  EXPECT_GE(data::Evaluate(m, d).acc, 0.95);
}

TEST(TrainTest, RejectsBadConfig) {
  const auto d = TwoBlobs();
  TrainConfig cfg;
  cfg.epochs = 0;
  EXPECT_PF_ERROR(TrainSgd(MlpSpec{{6, 4, 2}}, d, cfg), ErrorCode::kInvalidArgument);
  cfg.epochs = 1;
  cfg.batch_size = 0;
  EXPECT_PF_ERROR(TrainSgd(MlpSpec{{6, 4, 2}}, d, cfg), ErrorCode::kInvalidArgument);
}

TEST(TrainTest, HugeLearningRateReportsDivergence) {
  const auto d = data::SynthBlobs(2, 50, 6, 0.5, 4);
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.learning_rate = 1e200;
  try {
    TrainSgd(MlpSpec{{6, 4, 2}}, d, cfg);
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivergence);
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
  }
}

TEST(InitTest, WeightsWithinFanInBound) {
  const MlpModel m = InitializeModel(MlpSpec{{16, 9, 4}}, 5);
  EXPECT_LE(m.weights[0].cwiseAbs().maxCoeff(), 1.0 / 4.0);
  EXPECT_LE(m.weights[1].cwiseAbs().maxCoeff(), 1.0 / 3.0);
}

class ModelIoTest : public ::testing::Test {
 protected:
  std::string TempPath(const std::string& name) {
    return (std::filesystem::temp_directory_path() /
            ("privfusion_nn_" + std::to_string(::getpid()) + "_" + name))
        .string();
  }
};

TEST_F(ModelIoTest, SaveLoadIsBitExact) {
  MlpModel m = RandomModel({784, 32, 32, 10}, 9, /*use_bias=*/true);
  m.weights[0](0, 0) = 0.1 + 0.2;
  m.weights[1](3, 4) = -5e-324;
  m.weights[2](1, 1) = 1.7976931348623157e308;
  const std::string path = TempPath("model.json");
  SaveModel(m, path);
  const MlpModel back = LoadModel(path);
  EXPECT_TRUE(BitIdentical(m, back));
  EXPECT_EQ(back.spec.layer_sizes, (std::vector<size_t>{784, 32, 32, 10}));
  EXPECT_EQ(ModelDigest(m), ModelDigest(back));
  std::filesystem::remove(path);
}

TEST_F(ModelIoTest, TruncatedFileIsMalformed) {
  const std::string text = EncodeModel(RandomModel({3, 4, 2}, 1));
  const std::string path = TempPath("trunc.json");
  WriteFile(path, text.substr(0, text.size() / 2));
  EXPECT_PF_ERROR(LoadModel(path), ErrorCode::kMalformed);
  std::filesystem::remove(path);
}

TEST_F(ModelIoTest, MissingFileIsIoError) {
  EXPECT_PF_ERROR(LoadModel(TempPath("absent.json")), ErrorCode::kIo);
}

TEST_F(ModelIoTest, VersionAndShapeChecked) {
  Json j = ModelToJson(RandomModel({3, 4, 2}, 1));
  j["format_version"] = 2;
  EXPECT_PF_ERROR(ModelFromJson(j), ErrorCode::kVersionMismatch);
  j = ModelToJson(RandomModel({3, 4, 2}, 1));
  j["spec"]["layer_sizes"] = {3, 5, 2};
  EXPECT_PF_ERROR(ModelFromJson(j), ErrorCode::kMalformed);
}

TEST_F(ModelIoTest, DocumentLayout) {
  const Json j = ModelToJson(RandomModel({3, 4, 2}, 1));
  EXPECT_EQ(j["format_version"], 1);
  EXPECT_EQ(j["spec"]["activation"], "relu");
  EXPECT_EQ(j["spec"]["use_bias"], false);
  EXPECT_EQ(j["weights"].size(), 2u);
  EXPECT_FALSE(j.contains("biases"));
  EXPECT_EQ(j["weights"][0]["rows"], 4);
  EXPECT_EQ(j["weights"][0]["cols"], 3);
}

}  // namespace
}  // namespace privfusion::nn
