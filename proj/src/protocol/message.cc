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

#include "protocol/message.h"

#include <array>

#include "common/error.h"
#include "fusion/pipeline.h"
#include "nn/model_io.h"

namespace privfusion::protocol {
namespace {

constexpr std::array<std::string_view, 6> kTypeNames = {
    "HELLO", "GRAPH_SHARE", "ALIGNED_WEIGHTS", "FUSED_MODEL", "ERROR", "BYE"};

char SymbolChar(int8_t s) { return s > 0 ? '+' : (s < 0 ? '-' : '0'); }

int8_t CharSymbol(char c) {
  switch (c) {
    case '+': return 1;
    case '-': return -1;
    case '0': return 0;
    default: Fail(ErrorCode::kMalformed, "bad MultiBit symbol character");
  }
}

Json EncodingToJson(const ldp::MultiBitEncoding& e) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < e.symbols.rows(); ++r) {
    std::string s(static_cast<size_t>(e.symbols.cols()), '0');
    for (Eigen::Index c = 0; c < e.symbols.cols(); ++c) s[static_cast<size_t>(c)] = SymbolChar(e.symbols(r, c));
    rows.push_back(std::move(s));
  }
  return {{"m", e.m}, {"d", e.d}, {"w_min", e.w_min}, {"w_max", e.w_max},
          {"eps_w", e.eps_w}, {"symbols", std::move(rows)}};
}

ldp::MultiBitEncoding EncodingFromJson(const Json& j) {
  ldp::MultiBitEncoding e;
  e.m = Field(j, "m", "encoding").get<int>();
  e.d = Field(j, "d", "encoding").get<int>();
  e.w_min = Field(j, "w_min", "encoding").get<double>();
  e.w_max = Field(j, "w_max", "encoding").get<double>();
  e.eps_w = Field(j, "eps_w", "encoding").get<double>();
  const auto& rows = Field(j, "symbols", "encoding");
  Require(rows.is_array() && e.d > 0, ErrorCode::kMalformed, "encoding symbols must be an array");
  e.symbols.resize(static_cast<Eigen::Index>(rows.size()), e.d);
  for (size_t r = 0; r < rows.size(); ++r) {
    const auto& s = rows[r].get_ref<const std::string&>();
    Require(s.size() == static_cast<size_t>(e.d), ErrorCode::kMalformed,
            "encoding symbol row has the wrong length");
    for (size_t c = 0; c < s.size(); ++c) {
      e.symbols(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = CharSymbol(s[c]);
    }
  }
  e.Validate();
  return e;
}

Json BodyToJson(const Body& body) {
  struct Visitor {
    Json operator()(const Hello& h) const {
      return {{"protocol_version", h.protocol_version}, {"party_id", h.party_id},
              {"arch_digest", h.arch_digest}, {"probe_digest", h.probe_digest},
              {"budget", fusion::BudgetToJson(h.budget)}};
    }
    Json operator()(const GraphShare& g) const { return {{"graph", PerturbedGraphToJson(g.graph)}}; }
    Json operator()(const AlignedWeights& a) const {
      Json w = Json::array(), b = Json::array();
      for (const auto& m : a.weights) w.push_back(MatrixToJson(m));
      for (const auto& v : a.biases) b.push_back(VectorToJson(v));
      return {{"weights", w}, {"biases", b}, {"pfa_enabled", a.pfa_enabled},
              {"sfu_enabled", a.sfu_enabled}, {"sfu_rescale", a.sfu_rescale},
              {"fixed_alpha", a.fixed_alpha}, {"rule", a.rule}};
    }
    Json operator()(const FusedModel& f) const { return {{"model", nn::ModelToJson(f.model)}}; }
    Json operator()(const ErrorReport& e) const { return {{"code", e.code}, {"detail", e.detail}}; }
    Json operator()(const Bye&) const { return Json::object(); }
  };
  return std::visit(Visitor{}, body);
}

Body BodyFromJson(MessageType type, const Json& j) {
  constexpr std::string_view what = "message body";
  Require(j.is_object(), ErrorCode::kMalformed, "message body must be an object");
  switch (type) {
    case MessageType::kHello: {
      Hello h;
      h.protocol_version = Field(j, "protocol_version", what).get<int>();
      h.party_id = Field(j, "party_id", what).get<std::string>();
      h.arch_digest = Field(j, "arch_digest", what).get<std::string>();
      h.probe_digest = Field(j, "probe_digest", what).get<std::string>();
      h.budget = fusion::BudgetFromJson(Field(j, "budget", what));
      return h;
    }
    case MessageType::kGraphShare:
      return GraphShare{PerturbedGraphFromJson(Field(j, "graph", what))};
    case MessageType::kAlignedWeights: {
      AlignedWeights a;
      for (const auto& m : Field(j, "weights", what)) a.weights.push_back(MatrixFromJson(m, "aligned weights"));
      for (const auto& v : Field(j, "biases", what)) a.biases.push_back(VectorFromJson(v, "aligned biases"));
      a.pfa_enabled = Field(j, "pfa_enabled", what).get<bool>();
      a.sfu_enabled = Field(j, "sfu_enabled", what).get<bool>();
      a.sfu_rescale = Field(j, "sfu_rescale", what).get<bool>();
      a.fixed_alpha = Field(j, "fixed_alpha", what).get<double>();
      a.rule = Field(j, "rule", what).get<std::string>();
      return a;
    }
    case MessageType::kFusedModel:
      return FusedModel{nn::ModelFromJson(Field(j, "model", what))};
    case MessageType::kError:
      return ErrorReport{Field(j, "code", what).get<int>(), Field(j, "detail", what).get<std::string>()};
    case MessageType::kBye:
      return Bye{};
  }
  Fail(ErrorCode::kMalformed, "unknown message type");
}

}  // namespace

std::string_view MessageTypeName(MessageType t) { return kTypeNames.at(static_cast<size_t>(t)); }

MessageType ParseMessageType(std::string_view name) {
  for (size_t i = 0; i < kTypeNames.size(); ++i) {
    if (kTypeNames[i] == name) return static_cast<MessageType>(i);
  }
  Fail(ErrorCode::kMalformed, "unknown message type '" + std::string(name) + "'");
}

Json PerturbedGraphToJson(const ldp::PerturbedGraph& g) {
  Json nodes = Json::array(), weights = Json::array();
  for (const auto& m : g.node_features) nodes.push_back(MatrixToJson(m));
  for (const auto& w : g.weights) {
    if (w.encoding) {
      weights.push_back({{"encoding", EncodingToJson(*w.encoding)}});
    } else {
      weights.push_back({{"clear", MatrixToJson(w.clear)}});
    }
  }
  return {{"layer_sizes", g.layer_sizes}, {"node_features", nodes}, {"weights", weights},
          {"budget", fusion::BudgetToJson(g.budget)}};
}

ldp::PerturbedGraph PerturbedGraphFromJson(const Json& j) {
  constexpr std::string_view what = "perturbed graph";
  ldp::PerturbedGraph g;
  try {
    g.layer_sizes = Field(j, "layer_sizes", what).get<std::vector<size_t>>();
    for (const auto& m : Field(j, "node_features", what)) {
      g.node_features.push_back(MatrixFromJson(m, "node features"));
    }
    for (const auto& w : Field(j, "weights", what)) {
      ldp::WeightShare s;
      if (w.contains("encoding")) {
        s.encoding = EncodingFromJson(w["encoding"]);
      } else {
        s.clear = MatrixFromJson(Field(w, "clear", what), "clear weights");
      }
      g.weights.push_back(std::move(s));
    }
    g.budget = fusion::BudgetFromJson(Field(j, "budget", what));
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kMalformed, std::string("perturbed graph: ") + e.what());
  }
  g.Validate();
  return g;
}

Json MessageToJson(const Message& m) {
  return {{"version", kProtocolVersion},
          {"type", std::string(MessageTypeName(m.type()))},
          {"session_id", m.session_id},
          {"sequence", m.sequence},
          {"body", BodyToJson(m.body)}};
}

Message MessageFromJson(const Json& j) {
  constexpr std::string_view what = "message";
  Require(j.is_object(), ErrorCode::kMalformed, "message must be an object");
  try {
    const auto& v = Field(j, "version", what);
    Require(v.is_number_integer(), ErrorCode::kMalformed, "message version must be an integer");
    Require(v.get<int>() == kProtocolVersion, ErrorCode::kVersionMismatch,
            "unsupported protocol version " + v.dump());
    Message m;
    m.session_id = Field(j, "session_id", what).get<std::string>();
    m.sequence = Field(j, "sequence", what).get<uint64_t>();
    const auto type = ParseMessageType(Field(j, "type", what).get<std::string>());
    m.body = BodyFromJson(type, Field(j, "body", what));
    return m;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kMalformed, std::string("message: ") + e.what());
  }
}

std::string SerializeMessage(const Message& m) { return CanonicalDump(MessageToJson(m)); }

Message DeserializeMessage(std::string_view document) {
  return MessageFromJson(ParseDocument(document, "message"));
}

std::string EncodeFrame(const Message& m) {
  const std::string doc = SerializeMessage(m);
  Require(doc.size() <= kMaxFrameBytes, ErrorCode::kMalformed, "message exceeds the frame size cap");
  const auto n = static_cast<uint32_t>(doc.size());
  std::string frame;
  frame.reserve(4 + doc.size());
  frame.push_back(static_cast<char>(n >> 24));
  frame.push_back(static_cast<char>(n >> 16));
  frame.push_back(static_cast<char>(n >> 8));
  frame.push_back(static_cast<char>(n));
  frame += doc;
  return frame;
}

uint32_t FrameBodyLength(const unsigned char header[4]) {
  const uint32_t n = (uint32_t{header[0]} << 24) | (uint32_t{header[1]} << 16) |
                     (uint32_t{header[2]} << 8) | uint32_t{header[3]};
  Require(n > 0, ErrorCode::kMalformed, "empty frame");
  Require(n <= kMaxFrameBytes, ErrorCode::kMalformed,
          "frame length " + std::to_string(n) + " exceeds the cap");
  return n;
}

Message DecodeFrame(std::string_view frame) {
  Require(frame.size() >= 4, ErrorCode::kMalformed, "frame shorter than its header");
  const uint32_t n = FrameBodyLength(reinterpret_cast<const unsigned char*>(frame.data()));
  Require(frame.size() - 4 == n, ErrorCode::kMalformed, "frame length does not match its header");
  return DeserializeMessage(frame.substr(4));
}

}  // namespace privfusion::protocol
