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

#ifndef PRIVFUSION_PROTOCOL_SESSION_H_
#define PRIVFUSION_PROTOCOL_SESSION_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "common/canonical.h"
#include "common/error.h"
#include "fusion/pipeline.h"
#include "ldp/budget.h"
#include "matching/matcher.h"
#include "nn/mlp.h"
#include "protocol/message.h"
#include "protocol/state_machine.h"
#include "protocol/transport.h"

namespace privfusion::protocol {

// Largest budget a party accepts from its peer, per mechanism.
struct BudgetCeiling {
  double eps_a = 1.0;
  double eps_w = 1.0;
  double eps_f = 1.0;
};

struct PartyConfig {
  Role role = Role::kInitiator;
  std::string party_id;
  // The initiator's id names the session (derived when empty); a responder
  // with an empty id adopts the initiator's.
  std::string session_id;
  fusion::PipelineConfig pipeline;
  ldp::NoiseSpec noise;
  BudgetCeiling ceiling;
  // Required, together with an insecure transport, for test-mode sessions.
  bool insecure = false;
};

struct TranscriptEntry {
  std::string direction;  // "send" or "recv"
  std::string phase;      // phase after the message was handled
  std::string type;
  uint64_t sequence = 0;
  size_t byte_size = 0;
  std::string digest;  // SHA-256 of the whole frame
  Json detail;         // declared budgets for HELLO, code/detail for ERROR
};

struct Transcript {
  std::vector<TranscriptEntry> entries;
  std::vector<std::string> frames;  // raw bytes, same order as entries

  std::string ToJsonl() const;
};

struct SessionResult {
  bool ok = false;
  int error_code = 0;
  std::string error_message;
  Phase phase = Phase::kInit;
  nn::MlpModel fused;
  std::string fused_digest;
  std::string remote_fused_digest;
  nn::MlpModel initiator_operand;
  nn::MlpModel responder_operand;
  matching::MatchResult match;
  std::optional<Hello> remote_hello;
  double epsilon_spent = 0;
  Transcript transcript;
};

// Digest binding the public probe set into HELLO.
std::string ProbeDigest(const Matrix& probe);

// One party of a two-party session. Run() executes the whole script; the
// individual steps are public so tests can drive illegal orderings.
class PartySession {
 public:
  PartySession(PartyConfig config, const nn::MlpModel& model, const Matrix& probe,
               Transport& transport);

  SessionResult Run();

  void SendHello();
  void ReceiveHello();
  void SendGraph();
  void ReceiveGraph();
  void Match();
  void SendAligned();
  void ReceiveAligned();
  void Fuse();
  void SendFused();
  void ReceiveFused();
  void SendBye();
  void ReceiveBye();

  Phase phase() const { return state_.phase(); }
  const ldp::Accountant& accountant() const { return accountant_; }
  const Transcript& transcript() const { return transcript_; }

 private:
  void CheckPolicy() const;
  void Send(Body body);
  Message Receive(MessageType expected);
  void Record(const std::string& direction, const Message& m, const std::string& frame);
  void ReportFailure(const Error& e);

  PartyConfig config_;
  const nn::MlpModel& model_;
  const Matrix& probe_;
  Transport& transport_;
  SessionStateMachine state_;
  ldp::Accountant accountant_;
  Transcript transcript_;
  bool peer_failed_ = false;

  std::optional<fusion::LocalShare> share_;
  std::optional<Hello> remote_hello_;
  std::optional<ldp::PerturbedGraph> remote_graph_;
  matching::MatchResult match_;
  nn::MlpModel aligned_;
  nn::MlpModel own_operand_;
  nn::MlpModel remote_operand_;
  nn::MlpModel fused_;
  std::string fused_digest_;
  std::string remote_fused_digest_;
};

SessionResult RunSession(const PartyConfig& config, const nn::MlpModel& model,
                         const Matrix& probe, Transport& transport);

// Both roles in one process over a loopback pair; the responder runs on a
// second thread. Returns (initiator result, responder result).
std::pair<SessionResult, SessionResult> RunLoopbackSession(
    const PartyConfig& initiator, const nn::MlpModel& initiator_model,
    const PartyConfig& responder, const nn::MlpModel& responder_model,
    const Matrix& probe, const TransportOptions& options = {});

struct MultipartyResult {
  nn::MlpModel fused;
  // Cumulative epsilon charged to each owner: an owner pays for every session
  // that processes a model containing its own.
  std::vector<double> owner_epsilon;
  double total_epsilon = 0;  // largest per-owner total
  std::vector<std::string> session_digests;
};

// Sequential pairwise fusion: F1 = fuse(m1, m2), F2 = fuse(F1, m3), ... over
// loopback sessions; the running fused model is always the initiator. Session
// k draws noise from substreams ("initiator", k) / ("responder", k) of seed.
MultipartyResult RunMultiparty(const std::vector<nn::MlpModel>& models, const Matrix& probe,
                               const fusion::PipelineConfig& config, uint64_t seed,
                               bool insecure = false);

}  // namespace privfusion::protocol

#endif  // PRIVFUSION_PROTOCOL_SESSION_H_
