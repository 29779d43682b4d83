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

#include "protocol/state_machine.h"

#include "common/error.h"

namespace privfusion::protocol {
namespace {

std::vector<Step> BuildScript(Role role) {
  using D = Direction;
  const D first = role == Role::kInitiator ? D::kSend : D::kReceive;
  const D second = role == Role::kInitiator ? D::kReceive : D::kSend;
  std::vector<Step> s;
  auto exchange = [&](MessageType t, Phase after) {
    s.push_back({first, t, Phase::kInit});  // filled in below
    s.push_back({second, t, after});
  };
  exchange(MessageType::kHello, Phase::kHelloExchanged);
  exchange(MessageType::kGraphShare, Phase::kGraphShared);
  s.push_back({D::kLocal, std::nullopt, Phase::kMatched});
  exchange(MessageType::kAlignedWeights, Phase::kWeightsExchanged);
  s.push_back({D::kLocal, std::nullopt, Phase::kFused});
  exchange(MessageType::kFusedModel, Phase::kFused);
  exchange(MessageType::kBye, Phase::kClosed);
  // The first half of an exchange leaves the phase where it was.
  Phase current = Phase::kInit;
  for (auto& step : s) {
    if (step.phase_after == Phase::kInit) step.phase_after = current;
    current = step.phase_after;
  }
  return s;
}

}  // namespace

std::string_view RoleName(Role r) { return r == Role::kInitiator ? "initiator" : "responder"; }

Role ParseRole(std::string_view name) {
  if (name == "initiator") return Role::kInitiator;
  if (name == "responder") return Role::kResponder;
  privfusion::Fail(ErrorCode::kInvalidArgument, "unknown role '" + std::string(name) + "'");
}

std::string_view PhaseName(Phase p) {
  switch (p) {
    case Phase::kInit: return "Init";
    case Phase::kHelloExchanged: return "HelloExchanged";
    case Phase::kGraphShared: return "GraphShared";
    case Phase::kMatched: return "Matched";
    case Phase::kWeightsExchanged: return "WeightsExchanged";
    case Phase::kFused: return "Fused";
    case Phase::kClosed: return "Closed";
    case Phase::kFailed: return "Failed";
  }
  return "?";
}

const std::vector<Step>& Script(Role role) {
  static const std::vector<Step> initiator = BuildScript(Role::kInitiator);
  static const std::vector<Step> responder = BuildScript(Role::kResponder);
  return role == Role::kInitiator ? initiator : responder;
}

SessionStateMachine::SessionStateMachine(Role role, std::string session_id)
    : role_(role), session_id_(std::move(session_id)) {}

std::optional<Step> SessionStateMachine::expected() const {
  const auto& script = Script(role_);
  if (phase_ == Phase::kFailed || step_ >= script.size()) return std::nullopt;
  return script[step_];
}

void SessionStateMachine::Violation(const std::string& detail) {
  phase_ = Phase::kFailed;
  privfusion::Fail(ErrorCode::kSequenceViolation, detail);
}

void SessionStateMachine::Advance() {
  phase_ = Script(role_)[step_].phase_after;
  ++step_;
}

void SessionStateMachine::Fail() { phase_ = Phase::kFailed; }

void SessionStateMachine::OnSend(MessageType type) {
  if (phase_ == Phase::kFailed || phase_ == Phase::kClosed) {
    Violation("cannot send " + std::string(MessageTypeName(type)) + " in phase " +
              std::string(PhaseName(phase_)));
  }
  if (type == MessageType::kError) {
    ++send_seq_;
    phase_ = Phase::kFailed;
    return;
  }
  const auto next = expected();
  if (!next || next->direction != Direction::kSend || next->type != type) {
    Violation("sending " + std::string(MessageTypeName(type)) + " is not legal in phase " +
              std::string(PhaseName(phase_)));
  }
  ++send_seq_;
  Advance();
}

void SessionStateMachine::OnReceive(const Message& message) {
  const auto type = message.type();
  if (phase_ == Phase::kFailed || phase_ == Phase::kClosed) {
    Violation("received " + std::string(MessageTypeName(type)) + " in phase " +
              std::string(PhaseName(phase_)));
  }
  if (message.sequence != recv_seq_) {
    Violation("expected sequence " + std::to_string(recv_seq_) + ", got " +
              std::to_string(message.sequence));
  }
  if (session_id_.empty()) {
    session_id_ = message.session_id;
  } else if (message.session_id != session_id_) {
    Violation("message belongs to session '" + message.session_id + "'");
  }
  ++recv_seq_;
  if (type == MessageType::kError) {
    phase_ = Phase::kFailed;
    return;
  }
  const auto next = expected();
  if (!next || next->direction != Direction::kReceive || next->type != type) {
    Violation("receiving " + std::string(MessageTypeName(type)) + " is not legal in phase " +
              std::string(PhaseName(phase_)));
  }
  Advance();
}

void SessionStateMachine::OnLocal(Phase reached) {
  const auto next = expected();
  if (!next || next->direction != Direction::kLocal || next->phase_after != reached) {
    Violation("cannot enter " + std::string(PhaseName(reached)) + " from " +
              std::string(PhaseName(phase_)));
  }
  Advance();
}

}  // namespace privfusion::protocol
