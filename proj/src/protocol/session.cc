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

#include "protocol/session.h"

#include <algorithm>
#include <thread>

#include "common/rng.h"
#include "fusion/fusion.h"
#include "nn/model_io.h"

namespace privfusion::protocol {
namespace {

nn::MlpModel OperandFromMessage(const nn::MlpSpec& spec, const AlignedWeights& a) {
  nn::MlpModel m;
  m.spec = spec;
  m.weights = a.weights;
  m.biases = a.biases;
  try {
    m.Validate();
  } catch (const Error& e) {
    Fail(ErrorCode::kArchMismatch, std::string("aligned weights: ") + e.what());
  }
  return m;
}

}  // namespace

std::string Transcript::ToJsonl() const {
  std::string out;
  for (const auto& e : entries) {
    Json j = {{"direction", e.direction}, {"phase", e.phase}, {"type", e.type},
              {"sequence", e.sequence}, {"byte_size", e.byte_size}, {"digest", e.digest}};
    if (!e.detail.is_null()) j["detail"] = e.detail;
    out += CanonicalDump(j) + "\n";
  }
  return out;
}

std::string ProbeDigest(const Matrix& probe) { return Sha256Hex(CanonicalDump(MatrixToJson(probe))); }

PartySession::PartySession(PartyConfig config, const nn::MlpModel& model, const Matrix& probe,
                           Transport& transport)
    : config_(std::move(config)),
      model_(model),
      probe_(probe),
      transport_(transport),
      state_(config_.role),
      accountant_(config_.pipeline.budget) {
  config_.pipeline.Validate();
  model_.Validate();
  if (config_.role == Role::kInitiator && config_.session_id.empty()) {
    config_.session_id =
        "s-" + Sha256Hex(config_.party_id + "|" + nn::ArchDigest(model_.spec) + "|" +
                         std::to_string(config_.noise.seed))
                   .substr(0, 16);
  }
  state_ = SessionStateMachine(config_.role, config_.session_id);
}

void PartySession::CheckPolicy() const {
  if (config_.pipeline.budget.test_mode) {
    Require(config_.insecure && transport_.insecure(), ErrorCode::kInvalidArgument,
            "test mode needs both the party and the transport marked insecure");
  }
}

void PartySession::Record(const std::string& direction, const Message& m,
                          const std::string& frame) {
  TranscriptEntry e;
  e.direction = direction;
  e.phase = std::string(PhaseName(state_.phase()));
  e.type = std::string(MessageTypeName(m.type()));
  e.sequence = m.sequence;
  e.byte_size = frame.size();
  e.digest = Sha256Hex(frame);
  if (const auto* h = std::get_if<Hello>(&m.body)) {
    e.detail = {{"budget", fusion::BudgetToJson(h->budget)}, {"party_id", h->party_id}};
  } else if (const auto* r = std::get_if<ErrorReport>(&m.body)) {
    e.detail = {{"code", r->code}, {"detail", r->detail}};
  }
  transcript_.entries.push_back(std::move(e));
  transcript_.frames.push_back(frame);
}

void PartySession::Send(Body body) {
  Message m;
  m.session_id = state_.session_id();
  m.sequence = state_.next_send_sequence();
  m.body = std::move(body);
  state_.OnSend(m.type());
  const std::string frame = EncodeFrame(m);
  transport_.Send(frame);
  Record("send", m, frame);
}

Message PartySession::Receive(MessageType expected) {
  const std::string frame = transport_.Receive();
  Message m = DecodeFrame(frame);
  try {
    state_.OnReceive(m);
  } catch (const Error&) {
    Record("recv", m, frame);
    throw;
  }
  Record("recv", m, frame);
  if (const auto* r = std::get_if<ErrorReport>(&m.body)) {
    peer_failed_ = true;
    const int code = r->code;
    const auto ec = code >= 1 && code <= static_cast<int>(ErrorCode::kIo)
                        ? static_cast<ErrorCode>(code)
                        : ErrorCode::kTransport;
    Fail(ec, "peer reported failure: " + r->detail);
  }
  Require(m.type() == expected, ErrorCode::kSequenceViolation, "unexpected message type");
  return m;
}

void PartySession::SendHello() {
  CheckPolicy();
  Hello h;
  h.party_id = config_.party_id;
  h.arch_digest = nn::ArchDigest(model_.spec);
  h.probe_digest = ProbeDigest(probe_);
  h.budget = config_.pipeline.budget;
  Send(h);
}

void PartySession::ReceiveHello() {
  CheckPolicy();
  const Message m = Receive(MessageType::kHello);
  const auto& h = std::get<Hello>(m.body);
  remote_hello_ = h;
  Require(h.protocol_version == kProtocolVersion, ErrorCode::kVersionMismatch,
          "peer speaks protocol version " + std::to_string(h.protocol_version));
  Require(h.arch_digest == nn::ArchDigest(model_.spec), ErrorCode::kArchMismatch,
          "peer model architecture differs");
  Require(h.probe_digest == ProbeDigest(probe_), ErrorCode::kDigestMismatch,
          "peer holds a different probe set");
  Require(h.budget.test_mode == config_.pipeline.budget.test_mode, ErrorCode::kBudgetRefused,
          "peers disagree on test mode");
  if (!h.budget.test_mode) {
    const auto& c = config_.ceiling;
    Require(h.budget.eps_a <= c.eps_a && h.budget.eps_w <= c.eps_w && h.budget.eps_f <= c.eps_f,
            ErrorCode::kBudgetRefused, "peer budget exceeds the local ceiling");
  }
}

void PartySession::SendGraph() {
  accountant_.Consume(ldp::Mechanism::kNodeFeatures);
  accountant_.Consume(ldp::Mechanism::kWeightFeatures);
  if (!share_) share_ = fusion::PrepareShare(model_, probe_, config_.pipeline, config_.noise);
  Send(GraphShare{share_->shared});
}

void PartySession::ReceiveGraph() {
  Message m = Receive(MessageType::kGraphShare);
  auto& g = std::get<GraphShare>(m.body).graph;
  Require(g.layer_sizes == model_.spec.layer_sizes, ErrorCode::kArchMismatch,
          "peer graph has different layer sizes");
  for (const auto& nf : g.node_features) {
    Require(nf.cols() == probe_.rows(), ErrorCode::kMalformed,
            "peer node features do not cover the probe set");
  }
  remote_graph_ = std::move(g);
}

void PartySession::Match() {
  Require(share_ && remote_graph_, ErrorCode::kSequenceViolation, "nothing to match yet");
  state_.OnLocal(Phase::kMatched);
  match_ = matching::MatchModels(share_->graph, *remote_graph_, config_.pipeline.solver);
  aligned_ = config_.role == Role::kInitiator
                 ? model_
                 : fusion::AlignToInitiator(model_, match_.permutations);
}

void PartySession::SendAligned() {
  const auto& fc = config_.pipeline.fusion;
  if (fc.pfa_enabled) accountant_.Consume(ldp::Mechanism::kPfa);
  own_operand_ = fusion::ExchangeOperand(aligned_, config_.pipeline, config_.noise);
  AlignedWeights a;
  a.weights = own_operand_.weights;
  a.biases = own_operand_.biases;
  a.pfa_enabled = fc.pfa_enabled;
  a.sfu_enabled = fc.pfa.sfu_enabled;
  a.sfu_rescale = fc.pfa.sfu_rescale;
  a.fixed_alpha = config_.pipeline.fixed_alpha;
  a.rule = std::string(fusion::FusionRuleName(fc.rule));
  Send(std::move(a));
}

void PartySession::ReceiveAligned() {
  const Message m = Receive(MessageType::kAlignedWeights);
  const auto& a = std::get<AlignedWeights>(m.body);
  const auto& fc = config_.pipeline.fusion;
  Require(a.pfa_enabled == fc.pfa_enabled && a.sfu_enabled == fc.pfa.sfu_enabled &&
              a.sfu_rescale == fc.pfa.sfu_rescale &&
              a.fixed_alpha == config_.pipeline.fixed_alpha &&
              a.rule == fusion::FusionRuleName(fc.rule),
          ErrorCode::kInvalidArgument, "peer fusion settings differ");
  remote_operand_ = OperandFromMessage(model_.spec, a);
}

void PartySession::Fuse() {
  state_.OnLocal(Phase::kFused);
  const bool init = config_.role == Role::kInitiator;
  const auto& a = init ? own_operand_ : remote_operand_;
  const auto& b = init ? remote_operand_ : own_operand_;
  fused_ = fusion::FuseWeights(a, b, config_.pipeline.fixed_alpha, config_.pipeline.fusion.rule);
  fused_digest_ = nn::ModelDigest(fused_);
}

void PartySession::SendFused() { Send(FusedModel{fused_}); }

void PartySession::ReceiveFused() {
  const Message m = Receive(MessageType::kFusedModel);
  remote_fused_digest_ = nn::ModelDigest(std::get<FusedModel>(m.body).model);
  Require(remote_fused_digest_ == fused_digest_, ErrorCode::kDigestMismatch,
          "fused model digests disagree");
}

void PartySession::SendBye() { Send(Bye{}); }
void PartySession::ReceiveBye() { Receive(MessageType::kBye); }

void PartySession::ReportFailure(const Error& e) {
  state_.Fail();
  if (peer_failed_ || e.code() == ErrorCode::kTransport) return;
  try {
    Message m;
    m.session_id = state_.session_id();
    m.sequence = state_.next_send_sequence();
    m.body = ErrorReport{static_cast<int>(e.code()), e.what()};
    const std::string frame = EncodeFrame(m);
    transport_.Send(frame);
    Record("send", m, frame);
  } catch (const Error&) {
    // the peer is gone; the local transcript still records the failure
  }
}

SessionResult PartySession::Run() {
  SessionResult r;
  try {
    if (config_.role == Role::kInitiator) {
      SendHello();
      ReceiveHello();
      SendGraph();
      ReceiveGraph();
      Match();
      SendAligned();
      ReceiveAligned();
      Fuse();
      SendFused();
      ReceiveFused();
      SendBye();
      ReceiveBye();
    } else {
      ReceiveHello();
      SendHello();
      ReceiveGraph();
      SendGraph();
      Match();
      ReceiveAligned();
      SendAligned();
      Fuse();
      ReceiveFused();
      SendFused();
      ReceiveBye();
      SendBye();
    }
    r.ok = true;
  } catch (const Error& e) {
    ReportFailure(e);
    r.error_code = static_cast<int>(e.code());
    r.error_message = e.what();
  }
  r.phase = state_.phase();
  r.fused = fused_;
  r.fused_digest = fused_digest_;
  r.remote_fused_digest = remote_fused_digest_;
  const bool init = config_.role == Role::kInitiator;
  r.initiator_operand = init ? own_operand_ : remote_operand_;
  r.responder_operand = init ? remote_operand_ : own_operand_;
  r.match = match_;
  r.remote_hello = remote_hello_;
  r.epsilon_spent = accountant_.spent();
  r.transcript = transcript_;
  return r;
}

SessionResult RunSession(const PartyConfig& config, const nn::MlpModel& model,
                         const Matrix& probe, Transport& transport) {
  return PartySession(config, model, probe, transport).Run();
}

std::pair<SessionResult, SessionResult> RunLoopbackSession(
    const PartyConfig& initiator, const nn::MlpModel& initiator_model,
    const PartyConfig& responder, const nn::MlpModel& responder_model,
    const Matrix& probe, const TransportOptions& options) {
  auto [a, b] = MakeLoopbackPair(options);
  SessionResult resp;
  std::thread t([&, &b = b] {
    try {
      resp = RunSession(responder, responder_model, probe, *b);
    } catch (const Error& e) {
      resp.error_code = static_cast<int>(e.code());
      resp.error_message = e.what();
      b->Close();
    }
  });
  SessionResult init;
  try {
    init = RunSession(initiator, initiator_model, probe, *a);
  } catch (const Error& e) {
    init.error_code = static_cast<int>(e.code());
    init.error_message = e.what();
    a->Close();
  }
  t.join();
  return {std::move(init), std::move(resp)};
}

MultipartyResult RunMultiparty(const std::vector<nn::MlpModel>& models, const Matrix& probe,
                               const fusion::PipelineConfig& config, uint64_t seed,
                               bool insecure) {
  Require(models.size() >= 2, ErrorCode::kInvalidArgument, "multiparty fusion needs two or more models");
  MultipartyResult out;
  out.owner_epsilon.assign(models.size(), 0.0);
  nn::MlpModel running = models[0];
  TransportOptions options;
  options.insecure = insecure;
  for (size_t k = 1; k < models.size(); ++k) {
    PartyConfig init;
    init.role = Role::kInitiator;
    init.party_id = "owner-0";
    init.session_id = "multiparty-" + std::to_string(k);
    init.pipeline = config;
    init.noise.seed = SubstreamSeed(seed, "initiator", k);
    init.insecure = insecure;
    PartyConfig resp = init;
    resp.role = Role::kResponder;
    resp.party_id = "owner-" + std::to_string(k);
    resp.noise.seed = SubstreamSeed(seed, "responder", k);
    auto [ri, rr] = RunLoopbackSession(init, running, resp, models[k], probe, options);
    if (!ri.ok || !rr.ok) {
      const auto& bad = ri.ok ? rr : ri;
      Fail(static_cast<ErrorCode>(bad.error_code),
           "session " + std::to_string(k) + " failed: " + bad.error_message);
    }
    for (size_t owner = 0; owner < k; ++owner) out.owner_epsilon[owner] += ri.epsilon_spent;
    out.owner_epsilon[k] += rr.epsilon_spent;
    out.session_digests.push_back(ri.fused_digest);
    running = ri.fused;
  }
  out.fused = running;
  out.total_epsilon = *std::max_element(out.owner_epsilon.begin(), out.owner_epsilon.end());
  return out;
}

}  // namespace privfusion::protocol
