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

#ifndef PRIVFUSION_PROTOCOL_MESSAGE_H_
#define PRIVFUSION_PROTOCOL_MESSAGE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "common/canonical.h"
#include "common/matrix.h"
#include "ldp/budget.h"
#include "ldp/perturb.h"
#include "nn/mlp.h"

namespace privfusion::protocol {

inline constexpr int kProtocolVersion = 1;
inline constexpr uint32_t kMaxFrameBytes = 256u << 20;

enum class MessageType { kHello, kGraphShare, kAlignedWeights, kFusedModel, kError, kBye };
std::string_view MessageTypeName(MessageType t);
MessageType ParseMessageType(std::string_view name);

struct Hello {
  int protocol_version = kProtocolVersion;
  std::string party_id;
  std::string arch_digest;
  std::string probe_digest;  // both parties must hold the same public probe
  ldp::PrivacyBudget budget;

  friend bool operator==(const Hello&, const Hello&) = default;
};

struct GraphShare {
  ldp::PerturbedGraph graph;
};

// The sender's fusion operand plus the settings it was produced with; the
// receiver refuses to fuse when they differ from its own.
struct AlignedWeights {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  bool pfa_enabled = true;
  bool sfu_enabled = true;
  bool sfu_rescale = true;
  double fixed_alpha = 0.5;
  std::string rule = "convex";
};

struct FusedModel {
  nn::MlpModel model;
};

struct ErrorReport {
  int code = 0;
  std::string detail;
};

struct Bye {};

using Body = std::variant<Hello, GraphShare, AlignedWeights, FusedModel, ErrorReport, Bye>;

struct Message {
  std::string session_id;
  uint64_t sequence = 0;  // per sender, starting at 0
  Body body;

  MessageType type() const { return static_cast<MessageType>(body.index()); }
};

Json MessageToJson(const Message& m);
Message MessageFromJson(const Json& j);

// Canonical document of a message, without the frame header.
std::string SerializeMessage(const Message& m);
Message DeserializeMessage(std::string_view document);

// 4-byte big-endian length, then the canonical document.
std::string EncodeFrame(const Message& m);
// Parses exactly one whole frame.
Message DecodeFrame(std::string_view frame);
// Validates a frame header; returns the body length.
uint32_t FrameBodyLength(const unsigned char header[4]);

Json PerturbedGraphToJson(const ldp::PerturbedGraph& g);
ldp::PerturbedGraph PerturbedGraphFromJson(const Json& j);

}  // namespace privfusion::protocol

#endif  // PRIVFUSION_PROTOCOL_MESSAGE_H_
