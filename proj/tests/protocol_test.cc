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
#include <cstring>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "fusion/pipeline.h"
#include "nn/model_io.h"
#include "protocol/message.h"
#include "protocol/session.h"
#include "protocol/state_machine.h"
#include "protocol/transport.h"
#include "protocol_checks.h"
#include "test_util.h"

namespace privfusion::protocol {
namespace {

using ::privfusion::testing::Incoming;
using ::privfusion::testing::LegalRun;
using ::privfusion::testing::RandomModel;
using ::privfusion::testing::UniformMatrix;

TEST(MessageTest, RandomizedRoundTripIsBitExact) {
  const auto r = ::privfusion::testing::RoundTripRandomMessages(2026, 10000);
  EXPECT_EQ(r.failure, "");
  EXPECT_EQ(r.messages, 10000);
}

TEST(MessageTest, FrameHeaderIsBigEndianLength) {
  Message m;
  m.session_id = "s";
  m.body = Bye{};
  const std::string frame = EncodeFrame(m);
  const std::string doc = SerializeMessage(m);
  ASSERT_EQ(frame.size(), doc.size() + 4);
  EXPECT_EQ(frame.substr(4), doc);
  const auto* h = reinterpret_cast<const unsigned char*>(frame.data());
  EXPECT_EQ((size_t{h[0]} << 24) | (size_t{h[1]} << 16) | (size_t{h[2]} << 8) | h[3], doc.size());
  EXPECT_EQ(doc.find('\n'), std::string::npos);
}

TEST(MessageTest, MalformedFrames) {
  EXPECT_PF_ERROR(DecodeFrame(std::string("\0\0\0\0", 4)), ErrorCode::kMalformed);
  EXPECT_PF_ERROR(DecodeFrame(std::string("\0\0", 2)), ErrorCode::kMalformed);
  EXPECT_PF_ERROR(DecodeFrame(std::string("\x7f\0\0\0", 4)), ErrorCode::kMalformed);
  EXPECT_PF_ERROR(DecodeFrame(std::string("\0\0\0\x05{}", 6)), ErrorCode::kMalformed);
  EXPECT_PF_ERROR(DecodeFrame(std::string("\0\0\0\x03{x}", 7)), ErrorCode::kMalformed);
  EXPECT_PF_ERROR(DeserializeMessage("[1,2]"), ErrorCode::kMalformed);
  EXPECT_PF_ERROR(DeserializeMessage(
                      R"({"body":{},"sequence":0,"session_id":"s","type":"SHOUT","version":1})"),
                  ErrorCode::kMalformed);
}

TEST(MessageTest, UnknownVersion) {
  Message m;
  m.body = Bye{};
  Json j = MessageToJson(m);
  EXPECT_NO_THROW(MessageFromJson(j));
  j["version"] = kProtocolVersion + 1;
  EXPECT_PF_ERROR(MessageFromJson(j), ErrorCode::kVersionMismatch);
}

TEST(MessageTest, GraphShareShapesForFullSizeModel) {
  const auto model = RandomModel({784, 32, 32, 10}, 1);
  const Matrix probe = UniformMatrix(200, 784, 2, 0, 1);
  fusion::PipelineConfig c;
  c.budget = ldp::PrivacyBudget{0.01, 0.1, 0.1};
  Message m;
  m.body = GraphShare{fusion::PrepareShare(model, probe, c, ldp::NoiseSpec{3}).shared};
  const Message back = DecodeFrame(EncodeFrame(m));
  const auto& g = std::get<GraphShare>(back.body).graph;
  ASSERT_EQ(g.node_features.size(), 2u);
  for (const Matrix& nf : g.node_features) {
    EXPECT_EQ(nf.rows(), 32);
    EXPECT_EQ(nf.cols(), 200);
  }
}

TEST(StateMachineTest, LegalRunsReachClosed) {
  for (Role role : {Role::kInitiator, Role::kResponder}) {
    SessionStateMachine sm(role, "s");
    uint64_t recv = 0;
    for (const auto& [e, phase] : LegalRun(role)) {
      if (e.direction == Direction::kSend) sm.OnSend(e.type);
      if (e.direction == Direction::kReceive) sm.OnReceive(Incoming(e.type, recv++, "s"));
      if (e.direction == Direction::kLocal) sm.OnLocal(e.local_phase);
      EXPECT_EQ(sm.phase(), phase);
    }
    EXPECT_EQ(sm.phase(), Phase::kClosed);
    EXPECT_FALSE(sm.expected().has_value());
  }
}

TEST(StateMachineTest, ResponderGraphShareBeforeHello) {
  SessionStateMachine sm(Role::kResponder, "s");
  EXPECT_PF_ERROR(sm.OnSend(MessageType::kGraphShare), ErrorCode::kSequenceViolation);
  EXPECT_EQ(sm.phase(), Phase::kFailed);
  SessionStateMachine sm2(Role::kInitiator, "s");
  sm2.OnSend(MessageType::kHello);
  EXPECT_PF_ERROR(sm2.OnReceive(Incoming(MessageType::kGraphShare, 0, "s")),
                  ErrorCode::kSequenceViolation);
}

TEST(StateMachineTest, RejectsBadSequenceAndForeignSession) {
  SessionStateMachine a(Role::kResponder, "s");
  EXPECT_PF_ERROR(a.OnReceive(Incoming(MessageType::kHello, 1, "s")), ErrorCode::kSequenceViolation);
  SessionStateMachine b(Role::kResponder, "s");
  EXPECT_PF_ERROR(b.OnReceive(Incoming(MessageType::kHello, 0, "t")), ErrorCode::kSequenceViolation);
  SessionStateMachine c(Role::kResponder);
  c.OnReceive(Incoming(MessageType::kHello, 0, "adopted"));
  EXPECT_EQ(c.session_id(), "adopted");
}

TEST(StateMachineTest, RandomOrderingsAdmitOnlyLegalTransitions) {
  const auto r = ::privfusion::testing::FuzzStateMachine(7, 1000);
  EXPECT_EQ(r.failure, "");
  EXPECT_EQ(r.cases, 1000);
  EXPECT_GT(r.rejected, 300);
  EXPECT_GT(r.completed, 0);
}

// ---------------------------------------------------------------- sessions

struct Parties {
  nn::MlpModel a;
  nn::MlpModel b;
  Matrix probe;
};

Parties SmallParties(uint64_t seed) {
  return {RandomModel({10, 8, 6, 4}, seed, true), RandomModel({10, 8, 6, 4}, seed + 1000, true),
          UniformMatrix(30, 10, seed + 2000, -1, 1)};
}

std::pair<PartyConfig, PartyConfig> Configs(const ldp::PrivacyBudget& budget, uint64_t seed,
                                            bool insecure = false) {
  PartyConfig init;
  init.role = Role::kInitiator;
  init.party_id = "alice";
  init.pipeline.budget = budget;
  init.noise = ldp::NoiseSpec{seed};
  init.insecure = insecure;
  PartyConfig resp = init;
  resp.role = Role::kResponder;
  resp.party_id = "bob";
  resp.noise = ldp::NoiseSpec{seed + 1};
  return {init, resp};
}

void ExpectMatchesOffline(const ldp::PrivacyBudget& budget, uint64_t seed, bool insecure) {
  const Parties p = SmallParties(seed);
  const auto [ci, cr] = Configs(budget, seed, insecure);
  TransportOptions t;
  t.insecure = insecure;
  const auto [ri, rr] = RunLoopbackSession(ci, p.a, cr, p.b, p.probe, t);
  ASSERT_TRUE(ri.ok) << ri.error_message;
  ASSERT_TRUE(rr.ok) << rr.error_message;
  EXPECT_EQ(ri.phase, Phase::kClosed);
  EXPECT_EQ(ri.fused_digest, rr.fused_digest);
  EXPECT_EQ(ri.remote_fused_digest, ri.fused_digest);
  const auto offline = fusion::RunOfflinePipeline(p.a, p.b, p.probe, ci.pipeline, ci.noise, cr.noise);
  EXPECT_TRUE(nn::BitIdentical(ri.fused, offline.fused));
  EXPECT_TRUE(nn::BitIdentical(rr.fused, offline.fused));
  EXPECT_EQ(ri.fused_digest, nn::ModelDigest(offline.fused));
  EXPECT_EQ(rr.match.permutations.perms, offline.responder_match.permutations.perms);
}

TEST(SessionTest, LoopbackEqualsOfflineInTestMode) {
  ExpectMatchesOffline(ldp::PrivacyBudget::TestMode(), 1, /*insecure=*/true);
}

TEST(SessionTest, LoopbackEqualsOfflineUnderPrivacy) {
  for (uint64_t seed : {2, 3, 4}) ExpectMatchesOffline(ldp::PrivacyBudget{0.01, 0.1, 0.1}, seed, false);
}

TEST(SessionTest, SameModelTestModeFusesToItself) {
  const Parties p = SmallParties(5);
  const auto [ci, cr] = Configs(ldp::PrivacyBudget::TestMode(), 5, true);
  TransportOptions t;
  t.insecure = true;
  const auto [ri, rr] = RunLoopbackSession(ci, p.a, cr, p.a, p.probe, t);
  ASSERT_TRUE(ri.ok) << ri.error_message;
  EXPECT_TRUE(nn::BitIdentical(ri.fused, p.a));
  EXPECT_EQ(ri.epsilon_spent, 0.0);
}

TEST(SessionTest, TranscriptRecordsEveryFrame) {
  const Parties p = SmallParties(6);
  const auto [ci, cr] = Configs(ldp::PrivacyBudget{0.01, 0.1, 0.1}, 6);
  const auto [ri, rr] = RunLoopbackSession(ci, p.a, cr, p.b, p.probe);
  ASSERT_TRUE(ri.ok);
  ASSERT_EQ(ri.transcript.entries.size(), 10u);
  const std::vector<std::string> types = {"HELLO", "HELLO", "GRAPH_SHARE", "GRAPH_SHARE",
                                          "ALIGNED_WEIGHTS", "ALIGNED_WEIGHTS", "FUSED_MODEL",
                                          "FUSED_MODEL", "BYE", "BYE"};
  for (size_t i = 0; i < types.size(); ++i) {
    const auto& e = ri.transcript.entries[i];
    EXPECT_EQ(e.type, types[i]);
    EXPECT_EQ(e.direction, i % 2 == 0 ? "send" : "recv");
    EXPECT_EQ(e.sequence, i / 2);
    EXPECT_EQ(e.byte_size, ri.transcript.frames[i].size());
    EXPECT_EQ(e.digest, Sha256Hex(ri.transcript.frames[i]));
    // The responder saw the same bytes.
    EXPECT_EQ(rr.transcript.frames[i], ri.transcript.frames[i]);
  }
  EXPECT_EQ(ri.transcript.entries.back().phase, "Closed");
  EXPECT_EQ(ri.transcript.entries[0].detail["budget"]["eps_a"], 0.01);
  const std::string jsonl = ri.transcript.ToJsonl();
  EXPECT_EQ(std::count(jsonl.begin(), jsonl.end(), '\n'), 10);
  EXPECT_DOUBLE_EQ(ri.epsilon_spent, 0.21);
  EXPECT_DOUBLE_EQ(rr.epsilon_spent, 0.21);
}

TEST(SessionTest, SocketTransportMatchesLoopback) {
  const Parties p = SmallParties(7);
  const auto [ci, cr] = Configs(ldp::PrivacyBudget{0.1, 0.1, 0.1}, 7);
  const auto [li, lr] = RunLoopbackSession(ci, p.a, cr, p.b, p.probe);
  auto [x, y] = MakeSocketPair();
  SessionResult rr;
  std::thread t([&, &y = y] { rr = RunSession(cr, p.b, p.probe, *y); });
  const SessionResult ri = RunSession(ci, p.a, p.probe, *x);
  t.join();
  ASSERT_TRUE(ri.ok) << ri.error_message;
  ASSERT_TRUE(rr.ok) << rr.error_message;
  EXPECT_EQ(ri.fused_digest, li.fused_digest);
}

TEST(SessionTest, TranscriptsNeverCarryRawWeights) {
  const auto r = ::privfusion::testing::ScanSessionsForLeaks(20);
  EXPECT_EQ(r.failure, "");
  EXPECT_EQ(r.sessions, 20);
  EXPECT_GT(r.comparisons, 20000u);
}

TEST(SessionTest, BudgetOverCeilingIsRefused) {
  const Parties p = SmallParties(8);
  auto [ci, cr] = Configs(ldp::PrivacyBudget{0.5, 0.1, 0.1}, 8);
  cr.ceiling = {0.2, 1, 1};
  const auto [ri, rr] = RunLoopbackSession(ci, p.a, cr, p.b, p.probe);
  EXPECT_FALSE(rr.ok);
  EXPECT_EQ(rr.error_code, static_cast<int>(ErrorCode::kBudgetRefused));
  EXPECT_EQ(rr.phase, Phase::kFailed);
  EXPECT_FALSE(ri.ok);
  EXPECT_EQ(ri.error_code, static_cast<int>(ErrorCode::kBudgetRefused));
  EXPECT_EQ(ri.transcript.entries.back().type, "ERROR");
  EXPECT_EQ(ri.epsilon_spent, 0.0);
}

TEST(SessionTest, TableBudgetAcceptedUnderUnitCeiling) {
  const Parties p = SmallParties(9);
  const auto [ci, cr] = Configs(ldp::PrivacyBudget{0.01, 0.1, 0.1}, 9);
  ASSERT_EQ(cr.ceiling.eps_a, 1.0);
  const auto [ri, rr] = RunLoopbackSession(ci, p.a, cr, p.b, p.probe);
  EXPECT_TRUE(ri.ok && rr.ok);
}

TEST(SessionTest, ArchitectureMismatchFailsBothSides) {
  const Parties p = SmallParties(10);
  const auto [ci, cr] = Configs(ldp::PrivacyBudget{0.1, 0.1, 0.1}, 10);
  const auto other = RandomModel({10, 7, 6, 4}, 1);
  const auto [ri, rr] = RunLoopbackSession(ci, p.a, cr, other, p.probe);
  EXPECT_EQ(rr.error_code, static_cast<int>(ErrorCode::kArchMismatch));
  EXPECT_EQ(ri.error_code, static_cast<int>(ErrorCode::kArchMismatch));
}

TEST(SessionTest, TestModeNeedsInsecureChannel) {
  const Parties p = SmallParties(11);
  const auto [ci, cr] = Configs(ldp::PrivacyBudget::TestMode(), 11, /*insecure=*/true);
  const auto [ri, rr] = RunLoopbackSession(ci, p.a, cr, p.b, p.probe);  // secure transport
  EXPECT_EQ(ri.error_code, static_cast<int>(ErrorCode::kInvalidArgument));
  EXPECT_TRUE(ri.transcript.entries.empty() ||
              ri.transcript.entries.front().type != "HELLO");
}

// Drives a session by hand from the far end of a loopback pair.
class ScriptedPeer {
 public:
  explicit ScriptedPeer(Transport& t) : t_(t) {}
  void Send(Body body, const std::string& session) {
    Message m;
    m.session_id = session;
    m.sequence = seq_++;
    m.body = std::move(body);
    t_.Send(EncodeFrame(m));
  }
  Message Receive() { return DecodeFrame(t_.Receive()); }

 private:
  Transport& t_;
  uint64_t seq_ = 0;
};

TEST(SessionTest, ResponderRejectsGraphShareBeforeHello) {
  const Parties p = SmallParties(12);
  auto [ci, cr] = Configs(ldp::PrivacyBudget{0.1, 0.1, 0.1}, 12);
  auto [near, far] = MakeLoopbackPair();
  ScriptedPeer peer(*far);
  fusion::PipelineConfig c;
  peer.Send(GraphShare{fusion::PrepareShare(p.a, p.probe, c, {}).shared}, "x");
  const SessionResult r = RunSession(cr, p.b, p.probe, *near);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.error_code, static_cast<int>(ErrorCode::kSequenceViolation));
  EXPECT_EQ(r.phase, Phase::kFailed);
  const Message report = peer.Receive();
  ASSERT_EQ(report.type(), MessageType::kError);
  EXPECT_EQ(std::get<ErrorReport>(report.body).code, static_cast<int>(ErrorCode::kSequenceViolation));
}

TEST(SessionTest, SecondGraphShareExhaustsBudget) {
  const Parties p = SmallParties(13);
  auto [ci, cr] = Configs(ldp::PrivacyBudget{0.1, 0.1, 0.1}, 13);
  ci.session_id = "s";
  auto [near, far] = MakeLoopbackPair();
  ScriptedPeer peer(*far);
  PartySession session(ci, p.a, p.probe, *near);
  session.SendHello();
  Hello h;
  h.party_id = "bob";
  h.arch_digest = nn::ArchDigest(p.a.spec);
  h.probe_digest = ProbeDigest(p.probe);
  h.budget = ci.pipeline.budget;
  peer.Send(h, "s");
  session.ReceiveHello();
  session.SendGraph();
  EXPECT_EQ(session.phase(), Phase::kHelloExchanged);
  EXPECT_DOUBLE_EQ(session.accountant().spent(), 0.2);
  EXPECT_PF_ERROR(session.SendGraph(), ErrorCode::kBudgetExhausted);
  EXPECT_EQ(session.transcript().entries.size(), 3u);
}

TEST(SessionTest, PeerVanishingIsATransportFailure) {
  const Parties p = SmallParties(14);
  auto [ci, cr] = Configs(ldp::PrivacyBudget{0.1, 0.1, 0.1}, 14);
  TransportOptions t;
  t.receive_timeout = std::chrono::milliseconds(200);
  auto [near, far] = MakeLoopbackPair(t);
  far->Close();
  const SessionResult r = RunSession(ci, p.a, p.probe, *near);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.error_code, static_cast<int>(ErrorCode::kTransport));
}

// -------------------------------------------------------------- multiparty

TEST(MultipartyTest, ThreeOwnersComposeSerially) {
  const Matrix probe = UniformMatrix(30, 10, 1, -1, 1);
  std::vector<nn::MlpModel> models;
  for (uint64_t s = 1; s <= 3; ++s) models.push_back(RandomModel({10, 8, 6, 4}, s, true));
  fusion::PipelineConfig c;
  c.budget = ldp::PrivacyBudget{0.01, 0.1, 0.1};
  const MultipartyResult r = RunMultiparty(models, probe, c, 1);
  ASSERT_EQ(r.owner_epsilon.size(), 3u);
  EXPECT_NEAR(r.owner_epsilon[0], 0.42, 1e-12);
  EXPECT_NEAR(r.owner_epsilon[1], 0.42, 1e-12);
  EXPECT_NEAR(r.owner_epsilon[2], 0.21, 1e-12);
  EXPECT_NEAR(r.total_epsilon, 0.42, 1e-12);
  EXPECT_EQ(r.session_digests.size(), 2u);
  EXPECT_EQ(r.session_digests.back(), nn::ModelDigest(r.fused));
}

TEST(MultipartyTest, TwoOwnersEqualOneSession) {
  const Parties p = SmallParties(15);
  fusion::PipelineConfig c;
  c.budget = ldp::PrivacyBudget{0.1, 0.1, 0.1};
  const MultipartyResult r = RunMultiparty({p.a, p.b}, p.probe, c, 3);
  PartyConfig init;
  init.role = Role::kInitiator;
  init.party_id = "owner-0";
  init.session_id = "multiparty-1";
  init.pipeline = c;
  init.noise.seed = SubstreamSeed(3, "initiator", 1);
  PartyConfig resp = init;
  resp.role = Role::kResponder;
  resp.party_id = "owner-1";
  resp.noise.seed = SubstreamSeed(3, "responder", 1);
  const auto [ri, rr] = RunLoopbackSession(init, p.a, resp, p.b, p.probe);
  ASSERT_TRUE(ri.ok);
  EXPECT_TRUE(nn::BitIdentical(r.fused, ri.fused));
}

TEST(MultipartyTest, IdenticalModelsKeepTheirFunction) {
  const auto base = RandomModel({10, 8, 6, 4}, 4, true);
  std::vector<nn::MlpModel> models = {
      base, fusion::ApplyPermutations(base, ::privfusion::testing::RandomPermutations(base.spec.layer_sizes, 5)),
      fusion::ApplyPermutations(base, ::privfusion::testing::RandomPermutations(base.spec.layer_sizes, 6))};
  const Matrix probe = UniformMatrix(30, 10, 7, -1, 1);
  fusion::PipelineConfig c;
  c.budget = ldp::PrivacyBudget::TestMode();
  const MultipartyResult r = RunMultiparty(models, probe, c, 1, /*insecure=*/true);
  const Matrix x = UniformMatrix(100, 10, 8, -2, 2);
  EXPECT_LE((nn::Forward(r.fused, x) - nn::Forward(base, x)).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_EQ(r.total_epsilon, 0.0);
  EXPECT_PF_ERROR(RunMultiparty(models, probe, c, 1), ErrorCode::kInvalidArgument);
  EXPECT_PF_ERROR(RunMultiparty({base}, probe, c, 1, true), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace privfusion::protocol
