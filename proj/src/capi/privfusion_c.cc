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

#include "privfusion/privfusion.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "common/canonical.h"
#include "common/error.h"
#include "common/rng.h"
#include "data/dataset.h"
#include "data/metrics.h"
#include "fusion/experiment.h"
#include "fusion/fusion.h"
#include "fusion/pipeline.h"
#include "ldp/audit.h"
#include "ldp/mechanisms.h"
#include "matching/permutation.h"
#include "nn/model_io.h"
#include "nn/train.h"
#include "protocol/session.h"

struct pf_dataset {
  privfusion::data::LabeledDataset data;
};

struct pf_model {
  privfusion::nn::MlpModel model;
};

namespace {

using privfusion::ErrorCode;
using privfusion::Json;
using privfusion::Require;

thread_local std::string last_error;

template <typename F>
pf_status Guard(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const privfusion::Error& e) {
    last_error = e.what();
    return static_cast<pf_status>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return PF_INTERNAL;
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void SetString(char** out, const std::string& s) {
  if (out != nullptr) *out = Dup(s);
}

template <typename T>
void RequireNotNull(const T* p, const char* what) {
  Require(p != nullptr, ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL");
}

Json ParseOptional(const char* text, const char* what) {
  if (text == nullptr || *text == '\0') return Json::object();
  return privfusion::ParseDocument(text, what);
}

Json MetricsJson(const privfusion::data::MetricReport& m) {
  return {{"acc", m.acc}, {"ma_f1", m.ma_f1}, {"w_f1", m.w_f1}, {"ma_rec", m.ma_rec},
          {"w_rec", m.w_rec}, {"ma_prec", m.ma_prec}, {"w_prec", m.w_prec}};
}

pf_model* NewModel(privfusion::nn::MlpModel m) { return new pf_model{std::move(m)}; }
pf_dataset* NewDataset(privfusion::data::LabeledDataset d) { return new pf_dataset{std::move(d)}; }

privfusion::protocol::PartyConfig PartyFromJson(const Json& j, privfusion::protocol::Role role) {
  privfusion::protocol::PartyConfig c;
  c.role = role;
  try {
    c.party_id = j.value("party_id", std::string());
    if (c.party_id.empty()) c.party_id = std::string(privfusion::protocol::RoleName(role));
    c.session_id = j.value("session_id", std::string());
    if (j.contains("pipeline")) c.pipeline = privfusion::fusion::PipelineConfigFromJson(j["pipeline"]);
    c.noise.seed = j.value("noise_seed", uint64_t{0});
    if (j.contains("ceiling")) {
      const auto& cl = j["ceiling"];
      c.ceiling.eps_a = cl.value("eps_a", c.ceiling.eps_a);
      c.ceiling.eps_w = cl.value("eps_w", c.ceiling.eps_w);
      c.ceiling.eps_f = cl.value("eps_f", c.ceiling.eps_f);
    }
    c.insecure = j.value("insecure", false);
  } catch (const nlohmann::json::exception& e) {
    privfusion::Fail(ErrorCode::kMalformed, std::string("party config: ") + e.what());
  }
  return c;
}

Json SessionSummary(const privfusion::protocol::SessionResult& r) {
  Json j = {{"ok", r.ok},
            {"phase", std::string(privfusion::protocol::PhaseName(r.phase))},
            {"error_code", r.error_code},
            {"error", r.error_message},
            {"fused_digest", r.fused_digest},
            {"remote_fused_digest", r.remote_fused_digest},
            {"epsilon_spent", r.epsilon_spent},
            {"match_objective", r.match.objective},
            {"identity_objective", r.match.identity_objective}};
  if (r.remote_hello) {
    j["remote_party"] = r.remote_hello->party_id;
    j["remote_budget"] = privfusion::fusion::BudgetToJson(r.remote_hello->budget);
  }
  return j;
}

pf_status FinishSession(const privfusion::protocol::SessionResult& r, pf_model** fused,
                        char** transcript, Json& summary) {
  summary = SessionSummary(r);
  SetString(transcript, r.transcript.ToJsonl());
  if (r.ok && fused != nullptr) *fused = NewModel(r.fused);
  if (!r.ok) {
    last_error = r.error_message;
    return static_cast<pf_status>(r.error_code ? r.error_code : PF_INTERNAL);
  }
  return PF_OK;
}

pf_status RunStreamParty(bool listen, const char* host, uint16_t port, const pf_model* model,
                         const pf_dataset* probe, const char* party_json, int insecure_transport,
                         int timeout_ms, pf_model** fused, char** transcript,
                         char** summary_json) {
  return Guard([&] {
    RequireNotNull(model, "model");
    RequireNotNull(probe, "probe");
    const auto role = listen ? privfusion::protocol::Role::kResponder
                             : privfusion::protocol::Role::kInitiator;
    const auto party = PartyFromJson(ParseOptional(party_json, "party config"), role);
    privfusion::protocol::TransportOptions opts;
    opts.insecure = insecure_transport != 0;
    if (timeout_ms > 0) opts.receive_timeout = std::chrono::milliseconds(timeout_ms);
    const std::string h = host != nullptr ? host : "127.0.0.1";
    auto transport = listen ? privfusion::protocol::TcpListen(h, port, opts)
                            : privfusion::protocol::TcpConnect(h, port, opts, opts.receive_timeout);
    const auto r = privfusion::protocol::RunSession(party, model->model, probe->data.inputs, *transport);
    Json summary;
    const pf_status st = FinishSession(r, fused, transcript, summary);
    SetString(summary_json, privfusion::CanonicalDump(summary));
    return st;
  });
}

}  // namespace

extern "C" {

const char* pf_last_error(void) { return last_error.c_str(); }

const char* pf_status_name(pf_status status) {
  if (status == PF_OK) return "ok";
  if (status == PF_INTERNAL) return "internal";
  if (status >= 1 && status <= PF_IO) {
    return privfusion::ErrorCodeName(static_cast<ErrorCode>(status)).data();
  }
  return "unknown";
}

const char* pf_version(void) { return "0.1.0"; }

void pf_string_free(char* s) { std::free(s); }

uint64_t pf_substream_seed(uint64_t seed, const char* name, uint64_t index) {
  return privfusion::SubstreamSeed(seed, name != nullptr ? name : "", index);
}

pf_status pf_default_config(const char* section, char** json) {
  return Guard([&] {
    RequireNotNull(section, "section");
    RequireNotNull(json, "json");
    const std::string name = section;
    const privfusion::fusion::FixtureConfig fixture;
    Json out;
    if (name == "data") {
      out = privfusion::fusion::DataConfigToJson(fixture.data);
    } else if (name == "spec") {
      out = privfusion::nn::SpecToJson(fixture.spec);
    } else if (name == "train") {
      out = privfusion::fusion::FixtureConfigToJson(fixture)["train"];
    } else if (name == "pipeline") {
      out = privfusion::fusion::PipelineConfigToJson(privfusion::fusion::PipelineConfig{});
    } else if (name == "party") {
      const privfusion::protocol::BudgetCeiling ceiling;
      out = {{"party_id", ""}, {"session_id", ""}, {"insecure", false},
             {"ceiling", {{"eps_a", ceiling.eps_a}, {"eps_w", ceiling.eps_w}, {"eps_f", ceiling.eps_f}}}};
    } else if (name == "sweep") {
      const privfusion::fusion::SweepConfig sweep;
      out = {{"eps_a", sweep.eps_a}, {"eps_w", sweep.eps_w}, {"eps_f", sweep.eps_f},
             {"seeds", sweep.seeds}};
    } else {
      privfusion::Fail(ErrorCode::kInvalidArgument, "unknown config section '" + name + "'");
    }
    *json = Dup(privfusion::CanonicalDump(out));
    return PF_OK;
  });
}

pf_status pf_dataset_load_idx(const char* images_path, const char* labels_path, int class_count,
                              pf_dataset** out) {
  return Guard([&] {
    RequireNotNull(images_path, "images_path");
    RequireNotNull(labels_path, "labels_path");
    RequireNotNull(out, "out");
    *out = NewDataset(privfusion::data::LoadIdx(images_path, labels_path, class_count));
    return PF_OK;
  });
}

pf_status pf_dataset_synth_blobs(int class_count, int per_class, int input_dim, double spread,
                                 uint64_t seed, pf_dataset** out) {
  return Guard([&] {
    RequireNotNull(out, "out");
    *out = NewDataset(privfusion::data::SynthBlobs(class_count, per_class, input_dim, spread, seed));
    return PF_OK;
  });
}

pf_status pf_dataset_load(const char* data_config_json, uint64_t seed, pf_dataset** train,
                          pf_dataset** eval, pf_dataset** probe) {
  return Guard([&] {
    const auto cfg = privfusion::fusion::DataConfigFromJson(ParseOptional(data_config_json, "data config"));
    auto split = privfusion::fusion::LoadData(cfg, seed);
    if (train != nullptr) *train = NewDataset(std::move(split.train));
    if (eval != nullptr) *eval = NewDataset(std::move(split.eval));
    if (probe != nullptr) *probe = NewDataset(std::move(split.probe));
    return PF_OK;
  });
}

pf_status pf_dataset_partition(const pf_dataset* data, const char* plan_json, uint64_t seed,
                               pf_dataset** shard_a, pf_dataset** shard_b) {
  return Guard([&] {
    RequireNotNull(data, "data");
    RequireNotNull(shard_a, "shard_a");
    RequireNotNull(shard_b, "shard_b");
    Json dc = {{"partition", ParseOptional(plan_json, "partition plan")},
               {"classes", std::max(2, data->data.class_count)}};
    const auto plan = privfusion::fusion::DataConfigFromJson(dc).partition;
    auto [a, b] = privfusion::data::Partition(data->data, plan, seed);
    *shard_a = NewDataset(std::move(a));
    *shard_b = NewDataset(std::move(b));
    return PF_OK;
  });
}

pf_status pf_dataset_info(const pf_dataset* data, size_t* rows, size_t* input_dim,
                          int* class_count) {
  return Guard([&] {
    RequireNotNull(data, "data");
    if (rows != nullptr) *rows = data->data.size();
    if (input_dim != nullptr) *input_dim = data->data.input_dim();
    if (class_count != nullptr) *class_count = data->data.class_count;
    return PF_OK;
  });
}

pf_status pf_dataset_label_count(const pf_dataset* data, int label, size_t* count) {
  return Guard([&] {
    RequireNotNull(data, "data");
    RequireNotNull(count, "count");
    *count = data->data.CountLabel(label);
    return PF_OK;
  });
}

pf_status pf_dataset_digest(const pf_dataset* data, char** hex) {
  return Guard([&] {
    RequireNotNull(data, "data");
    RequireNotNull(hex, "hex");
    Json j = {{"inputs", privfusion::MatrixToJson(data->data.inputs)},
              {"labels", data->data.labels},
              {"class_count", data->data.class_count}};
    *hex = Dup(privfusion::Sha256Hex(privfusion::CanonicalDump(j)));
    return PF_OK;
  });
}

void pf_dataset_free(pf_dataset* data) { delete data; }

pf_status pf_model_train(const char* spec_json, const char* train_json, const pf_dataset* data,
                         pf_model** out) {
  return Guard([&] {
    RequireNotNull(spec_json, "spec_json");
    RequireNotNull(data, "data");
    RequireNotNull(out, "out");
    const auto spec = privfusion::nn::SpecFromJson(privfusion::ParseDocument(spec_json, "model spec"));
    const Json t = ParseOptional(train_json, "train config");
    privfusion::nn::TrainConfig cfg;
    try {
      cfg.epochs = t.value("epochs", cfg.epochs);
      cfg.batch_size = t.value("batch_size", cfg.batch_size);
      cfg.learning_rate = t.value("learning_rate", cfg.learning_rate);
      cfg.seed = t.value("seed", cfg.seed);
    } catch (const nlohmann::json::exception& e) {
      privfusion::Fail(ErrorCode::kMalformed, std::string("train config: ") + e.what());
    }
    *out = NewModel(privfusion::nn::TrainSgd(spec, data->data, cfg));
    return PF_OK;
  });
}

pf_status pf_model_load(const char* path, pf_model** out) {
  return Guard([&] {
    RequireNotNull(path, "path");
    RequireNotNull(out, "out");
    *out = NewModel(privfusion::nn::LoadModel(path));
    return PF_OK;
  });
}

pf_status pf_model_save(const pf_model* model, const char* path) {
  return Guard([&] {
    RequireNotNull(model, "model");
    RequireNotNull(path, "path");
    privfusion::nn::SaveModel(model->model, path);
    return PF_OK;
  });
}

pf_status pf_model_encode(const pf_model* model, char** text) {
  return Guard([&] {
    RequireNotNull(model, "model");
    RequireNotNull(text, "text");
    *text = Dup(privfusion::nn::EncodeModel(model->model));
    return PF_OK;
  });
}

pf_status pf_model_decode(const char* text, pf_model** out) {
  return Guard([&] {
    RequireNotNull(text, "text");
    RequireNotNull(out, "out");
    *out = NewModel(privfusion::nn::DecodeModel(text));
    return PF_OK;
  });
}

pf_status pf_model_digest(const pf_model* model, char** hex) {
  return Guard([&] {
    RequireNotNull(model, "model");
    RequireNotNull(hex, "hex");
    *hex = Dup(privfusion::nn::ModelDigest(model->model));
    return PF_OK;
  });
}

pf_status pf_model_evaluate(const pf_model* model, const pf_dataset* data, char** metrics_json) {
  return Guard([&] {
    RequireNotNull(model, "model");
    RequireNotNull(data, "data");
    RequireNotNull(metrics_json, "metrics_json");
    *metrics_json = Dup(privfusion::CanonicalDump(
        MetricsJson(privfusion::data::Evaluate(model->model, data->data))));
    return PF_OK;
  });
}

pf_status pf_model_shuffle(const pf_model* model, uint64_t seed, pf_model** out) {
  return Guard([&] {
    RequireNotNull(model, "model");
    RequireNotNull(out, "out");
    model->model.Validate();
    auto perms = privfusion::matching::PermutationSet::Identity(model->model.spec.layer_sizes);
    for (size_t h = 0; h < perms.perms.size(); ++h) {
      auto rng = privfusion::Substream(seed, "shuffle-model", h);
      auto& p = perms.perms[h];
      for (size_t i = p.size(); i > 1; --i) std::swap(p[i - 1], p[rng.UniformInt(i)]);
    }
    *out = NewModel(privfusion::fusion::ApplyPermutations(model->model, perms));
    return PF_OK;
  });
}

void pf_model_free(pf_model* model) { delete model; }

pf_status pf_fuse_offline(const pf_model* a, const pf_model* b, const pf_dataset* probe,
                          const pf_dataset* eval, const char* pipeline_json, uint64_t noise_seed_a,
                          uint64_t noise_seed_b, pf_model** fused, char** report_csv,
                          char** summary_json) {
  return Guard([&] {
    RequireNotNull(a, "a");
    RequireNotNull(b, "b");
    RequireNotNull(probe, "probe");
    const auto cfg = privfusion::fusion::PipelineConfigFromJson(ParseOptional(pipeline_json, "pipeline config"));
    const auto r = privfusion::fusion::RunOfflinePipeline(
        a->model, b->model, probe->data.inputs, cfg, {noise_seed_a}, {noise_seed_b},
        eval != nullptr ? &eval->data : nullptr);
    Json summary = {{"fused_digest", privfusion::nn::ModelDigest(r.fused)},
                    {"fixed_alpha", cfg.fixed_alpha},
                    {"identity_objective", r.responder_match.identity_objective},
                    {"match_objective", r.responder_match.objective},
                    {"permutation_agreement", r.permutation_agreement},
                    {"epsilon_per_party", cfg.budget.test_mode ? 0.0 : cfg.budget.total()}};
    if (eval != nullptr) {
      summary["report"] = r.report->ToJson();
      const auto va = privfusion::fusion::VanillaAverageBaseline(a->model, b->model, eval->data, cfg.fusion);
      summary["vanilla_average"] = va.ToJson();
      summary["prediction_ensemble"] =
          MetricsJson(privfusion::fusion::PredictionEnsembleBaseline({a->model, b->model}, eval->data));
      summary["model_a"] = MetricsJson(privfusion::data::Evaluate(a->model, eval->data));
      summary["model_b"] = MetricsJson(privfusion::data::Evaluate(b->model, eval->data));
      SetString(report_csv, r.report->ToCsv());
    } else if (report_csv != nullptr) {
      *report_csv = nullptr;
    }
    if (fused != nullptr) *fused = NewModel(r.fused);
    SetString(summary_json, privfusion::CanonicalDump(summary));
    return PF_OK;
  });
}

pf_status pf_protocol_loopback(const pf_model* initiator, const pf_model* responder,
                               const pf_dataset* probe, const char* initiator_json,
                               const char* responder_json, int insecure_transport,
                               pf_model** fused, char** initiator_transcript,
                               char** responder_transcript, char** summary_json) {
  return Guard([&] {
    RequireNotNull(initiator, "initiator");
    RequireNotNull(responder, "responder");
    RequireNotNull(probe, "probe");
    const auto pi = PartyFromJson(ParseOptional(initiator_json, "initiator config"),
                                  privfusion::protocol::Role::kInitiator);
    const auto pr = PartyFromJson(ParseOptional(responder_json, "responder config"),
                                  privfusion::protocol::Role::kResponder);
    privfusion::protocol::TransportOptions opts;
    opts.insecure = insecure_transport != 0;
    const auto [ri, rr] = privfusion::protocol::RunLoopbackSession(
        pi, initiator->model, pr, responder->model, probe->data.inputs, opts);
    Json si, sr;
    const pf_status a = FinishSession(ri, fused, initiator_transcript, si);
    const pf_status b = FinishSession(rr, nullptr, responder_transcript, sr);
    SetString(summary_json, privfusion::CanonicalDump(
                                {{"initiator", si}, {"responder", sr},
                                 {"digests_agree", ri.ok && rr.ok && ri.fused_digest == rr.fused_digest}}));
    if (a != PF_OK) {
      last_error = ri.error_message;
      return a;
    }
    if (b != PF_OK) last_error = rr.error_message;
    return b;
  });
}

pf_status pf_protocol_listen(const char* host, uint16_t port, const pf_model* model,
                             const pf_dataset* probe, const char* party_json,
                             int insecure_transport, int timeout_ms, pf_model** fused,
                             char** transcript, char** summary_json) {
  return RunStreamParty(true, host, port, model, probe, party_json, insecure_transport, timeout_ms,
                        fused, transcript, summary_json);
}

pf_status pf_protocol_connect(const char* host, uint16_t port, const pf_model* model,
                              const pf_dataset* probe, const char* party_json,
                              int insecure_transport, int timeout_ms, pf_model** fused,
                              char** transcript, char** summary_json) {
  return RunStreamParty(false, host, port, model, probe, party_json, insecure_transport,
                        timeout_ms, fused, transcript, summary_json);
}

pf_status pf_multiparty(const pf_model* const* models, size_t count, const pf_dataset* probe,
                        const char* pipeline_json, uint64_t seed, int insecure, pf_model** fused,
                        char** summary_json) {
  return Guard([&] {
    RequireNotNull(models, "models");
    RequireNotNull(probe, "probe");
    std::vector<privfusion::nn::MlpModel> list;
    for (size_t i = 0; i < count; ++i) {
      RequireNotNull(models[i], "model");
      list.push_back(models[i]->model);
    }
    const auto cfg = privfusion::fusion::PipelineConfigFromJson(ParseOptional(pipeline_json, "pipeline config"));
    const auto r = privfusion::protocol::RunMultiparty(list, probe->data.inputs, cfg, seed, insecure != 0);
    if (fused != nullptr) *fused = NewModel(r.fused);
    SetString(summary_json, privfusion::CanonicalDump(
                                {{"owner_epsilon", r.owner_epsilon},
                                 {"total_epsilon", r.total_epsilon},
                                 {"session_digests", r.session_digests},
                                 {"fused_digest", privfusion::nn::ModelDigest(r.fused)}}));
    return PF_OK;
  });
}

pf_status pf_sweep(const char* sweep_json, char** csv) {
  return Guard([&] {
    RequireNotNull(csv, "csv");
    const auto cfg = privfusion::fusion::SweepConfigFromJson(ParseOptional(sweep_json, "sweep config"));
    *csv = Dup(privfusion::fusion::SweepCsv(privfusion::fusion::RunSweep(cfg)));
    return PF_OK;
  });
}

pf_status pf_mechanism_audit(const char* mechanism, const char* params_json, char** report_json) {
  return Guard([&] {
    RequireNotNull(mechanism, "mechanism");
    RequireNotNull(report_json, "report_json");
    const Json p = ParseOptional(params_json, "audit parameters");
    const std::string name = mechanism;
    Json out;
    try {
      const auto seed = p.value("seed", uint64_t{0});
      if (name == "multibit") {
        out = privfusion::ldp::ToJson(privfusion::ldp::AuditMultiBit(
            p.value("epsilon", std::log(3.0)), p.value("m", 1), p.value("d", 1),
            p.value("trials", 1000000L), seed));
      } else if (name == "laplace") {
        out = privfusion::ldp::ToJson(privfusion::ldp::AuditLaplace(
            p.value("scale", 1.0), p.value("samples", 1000000L), seed));
      } else if (name == "rectifier") {
        out = privfusion::ldp::ToJson(privfusion::ldp::AuditRectifier(
            p.value("w", 0.3), p.value("epsilon", 1.0), p.value("m", 3), p.value("d", 10),
            p.value("w_min", -1.0), p.value("w_max", 1.0), p.value("trials", 100000L), seed));
      } else if (name == "gaussian") {
        const double eps = p.value("epsilon", 1.0), delta = p.value("delta", 1e-5),
                     sen = p.value("sensitivity", 1.0);
        out = {{"mechanism", "gaussian"}, {"epsilon", eps}, {"delta", delta},
               {"sensitivity", sen}, {"sigma", privfusion::ldp::GaussianSigma(eps, delta, sen)}};
      } else {
        privfusion::Fail(ErrorCode::kInvalidArgument, "unknown mechanism '" + name + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      privfusion::Fail(ErrorCode::kMalformed, std::string("audit parameters: ") + e.what());
    }
    *report_json = Dup(privfusion::CanonicalDump(out));
    return PF_OK;
  });
}

}  // extern "C"
