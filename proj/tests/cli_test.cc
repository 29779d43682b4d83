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
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

const char kData[] = " --subset 1000 --holdout 200 --input-dim 16 --probe-size 20";
const char kSmallData[] =
    " --subset 1000 --holdout 200 --input-dim 16 --probe-size 20 --layers 16,8,8,10"
    " --epochs 2";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ("cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the command line tool and returns its exit status.
  int Run(const std::string& args) {
    const std::string cmd = std::string(PRIVFUSION_CLI) + " " + args + " --out-dir " +
                            dir_.string() + " >" + (dir_ / "stdout.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string Read(const std::string& name) const {
    std::ifstream in(dir_ / name, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  Json Manifest() const { return Json::parse(Read("manifest.json")); }
  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(Run("train" + std::string(kSmallData) + " --epochs 0"), 2);
  EXPECT_EQ(Run("audit --mechanism laplace --trials 0"), 2);
  EXPECT_EQ(Run("sweep --eps-f-grid ''"), 2);
  EXPECT_EQ(Run("frobnicate"), 2);
}

TEST_F(CliTest, HeterogeneousTrainingKeepsTheDigitWithOneParty) {
  ASSERT_EQ(Run("train --seed 3 --partition heterogeneous --personalized-label 4" +
                std::string(kSmallData)),
            0)
      << Read("stdout.txt");
  const Json m = Manifest();
  EXPECT_EQ(m["exit_code"], 0);
  const Json& a = m["results"]["model_a"]["shard_label_counts"];
  const Json& b = m["results"]["model_b"]["shard_label_counts"];
  ASSERT_EQ(a.size(), 10u);
  EXPECT_EQ(b[4], 0);
  EXPECT_GT(a[4], 0);
  size_t rest_a = 0, rest_b = 0;
  for (int c = 0; c < 10; ++c) {
    if (c == 4) continue;
    rest_a += a[c].get<size_t>();
    rest_b += b[c].get<size_t>();
  }
  EXPECT_EQ(rest_a + rest_b + a[4].get<size_t>(), 1000u);
  EXPECT_NEAR(static_cast<double>(rest_a), 0.2 * static_cast<double>(rest_a + rest_b), 1.0);
  EXPECT_TRUE(fs::exists(Path("model_a.json")));
  EXPECT_TRUE(fs::exists(Path("model_b.json")));
}

TEST_F(CliTest, FuseRerunFromManifestIsByteIdentical) {
  ASSERT_EQ(Run("train --seed 5" + std::string(kSmallData)), 0) << Read("stdout.txt");
  const std::string models =
      " --model-a " + Path("model_a.json") + " --model-b " + Path("model_b.json");
  ASSERT_EQ(Run("fuse --seed 5 --eps-a 0.1 --eps-w 0.1 --eps-f 0.1" + std::string(kData) +
                models),
            0)
      << Read("stdout.txt");
  const std::string fused = Read("fused.json");
  const Json summary = Json::parse(Read("summary.json"));
  EXPECT_FALSE(summary["fused_digest"].get<std::string>().empty());
  fs::copy_file(Path("manifest.json"), Path("first_manifest.json"));
  ASSERT_EQ(Run("fuse --config " + Path("first_manifest.json") + models), 0) << Read("stdout.txt");
  EXPECT_EQ(Read("fused.json"), fused);
}

TEST_F(CliTest, TestModeNeedsInsecureFlag) {
  ASSERT_EQ(Run("train --seed 6" + std::string(kSmallData)), 0);
  const std::string models =
      " --model-a " + Path("model_a.json") + " --model-b " + Path("model_b.json");
  EXPECT_EQ(Run("fuse --test-mode" + std::string(kData) + models), 2);
  EXPECT_EQ(Run("fuse --test-mode --insecure" + std::string(kData) + models), 0)
      << Read("stdout.txt");
}

TEST_F(CliTest, ProtocolLoopbackAndArchMismatch) {
  ASSERT_EQ(Run("train --seed 7" + std::string(kSmallData)), 0);
  fs::copy_file(Path("model_a.json"), Path("a.json"));
  fs::copy_file(Path("model_b.json"), Path("b.json"));
  ASSERT_EQ(Run("protocol --loopback --model " + Path("a.json") + " --peer-model " + Path("b.json") +
                std::string(kData)),
            0)
      << Read("stdout.txt");
  EXPECT_TRUE(Json::parse(Read("summary.json"))["digests_agree"].get<bool>());
  EXPECT_NE(Read("transcript_initiator.jsonl").find("GRAPH_SHARE"), std::string::npos);

  ASSERT_EQ(Run("train --seed 7 --subset 1000 --holdout 200 --input-dim 16 --probe-size 20"
                " --layers 16,9,8,10 --epochs 1"),
            0);
  EXPECT_EQ(Run("protocol --loopback --model " + Path("a.json") + " --peer-model " +
                Path("model_a.json") + std::string(kData)),
            3);
  EXPECT_NE(Read("transcript_initiator.jsonl").find("ERROR"), std::string::npos);
  EXPECT_EQ(Manifest()["exit_code"], 3);
}

TEST_F(CliTest, DivergenceExitsFour) {
  EXPECT_EQ(Run("train --seed 1 --lr 1e300" + std::string(kSmallData)), 4) << Read("stdout.txt");
}

TEST_F(CliTest, AuditWritesReport) {
  ASSERT_EQ(Run("audit --mechanism gaussian --epsilon 1 --delta 1e-5 --sensitivity 1"), 0);
  EXPECT_NEAR(Json::parse(Read("audit.json"))["sigma"].get<double>(), 4.8448, 1e-3);
}

}  // namespace
