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

#ifndef PRIVFUSION_PROTOCOL_STATE_MACHINE_H_
#define PRIVFUSION_PROTOCOL_STATE_MACHINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "protocol/message.h"

namespace privfusion::protocol {

enum class Role { kInitiator, kResponder };
std::string_view RoleName(Role r);
Role ParseRole(std::string_view name);

enum class Phase {
  kInit,
  kHelloExchanged,
  kGraphShared,
  kMatched,
  kWeightsExchanged,
  kFused,
  kClosed,
  kFailed
};
std::string_view PhaseName(Phase p);

enum class Direction { kSend, kReceive, kLocal };

struct Step {
  Direction direction;
  std::optional<MessageType> type;  // empty for local steps
  Phase phase_after;
};

// The fixed script of one role: the initiator sends first in every exchange,
// the responder receives first. Local steps mark matching and fusion.
const std::vector<Step>& Script(Role role);

// Legal-transition checker for one party. Every outgoing or incoming message
// must be the next step of the script; ERROR is accepted in either direction
// at any phase and moves to kFailed. Incoming sequence numbers must count up
// from 0 and the session id must stay fixed. Violations move to kFailed and
// throw kSequenceViolation. Pure: no I/O.
class SessionStateMachine {
 public:
  explicit SessionStateMachine(Role role, std::string session_id = "");

  void OnSend(MessageType type);
  void OnReceive(const Message& message);
  void OnLocal(Phase reached);
  void Fail();

  Phase phase() const { return phase_; }
  Role role() const { return role_; }
  const std::string& session_id() const { return session_id_; }
  uint64_t next_send_sequence() const { return send_seq_; }
  // Next message type this party must send or receive, if any.
  std::optional<Step> expected() const;

 private:
  [[noreturn]] void Violation(const std::string& detail);
  void Advance();

  Role role_;
  std::string session_id_;
  size_t step_ = 0;
  Phase phase_ = Phase::kInit;
  uint64_t send_seq_ = 0;
  uint64_t recv_seq_ = 0;
};

}  // namespace privfusion::protocol

#endif  // PRIVFUSION_PROTOCOL_STATE_MACHINE_H_
