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

// Command-line front end. Every command resolves its configuration as
// defaults, then the config file (--config or $PRIVFUSION_CONFIG), then
// flags, and writes a manifest.json next to its outputs. Passing a manifest
// back as --config reruns the same command with the same settings.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "privfusion/privfusion.h"

namespace {

using Json = nlohmann::json;

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitProtocol = 3,
  kExitDivergence = 4,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
  ApiError(pf_status s, const std::string& message) : std::runtime_error(message), status(s) {}
  pf_status status;
};

void Check(pf_status status, const std::string& what) {
  if (status != PF_OK) {
    throw ApiError(status, what + ": " + pf_status_name(status) + ": " + pf_last_error());
  }
}

struct StringDeleter {
  void operator()(char* s) const { pf_string_free(s); }
};
struct ModelDeleter {
  void operator()(pf_model* m) const { pf_model_free(m); }
};
struct DatasetDeleter {
  void operator()(pf_dataset* d) const { pf_dataset_free(d); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;
using Model = std::unique_ptr<pf_model, ModelDeleter>;
using Dataset = std::unique_ptr<pf_dataset, DatasetDeleter>;

std::string Take(char* s) {
  OwnedString owned(s);
  return owned ? std::string(owned.get()) : std::string();
}

Json Defaults(const char* section) {
  char* text = nullptr;
  Check(pf_default_config(section, &text), "default config");
  return Json::parse(Take(text));
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ApiError(PF_IO, "cannot write '" + path.string() + "'");
}

// Flags are collected into holders and applied onto the resolved config
// only when given on the command line.
class FlagBinder {
 public:
  explicit FlagBinder(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* Value(const std::string& flags, const std::string& pointer,
                     const std::string& help) {
    auto holder = std::make_shared<T>();
    CLI::Option* opt = app_->add_option(flags, *holder, help);
    setters_.push_back([opt, holder, pointer](Json& j) {
      if (opt->count() > 0) j[Json::json_pointer(pointer)] = *holder;
    });
    return opt;
  }

  template <typename T>
  CLI::Option* List(const std::string& flags, const std::string& pointer,
                    const std::string& help) {
    return Value<std::vector<T>>(flags, pointer, help)->delimiter(',')->allow_extra_args(false);
  }

  CLI::Option* Flag(const std::string& flags, const std::string& pointer, bool value,
                    const std::string& help) {
    CLI::Option* opt = app_->add_flag(flags, help);
    setters_.push_back([opt, pointer, value](Json& j) {
      if (opt->count() > 0) j[Json::json_pointer(pointer)] = value;
    });
    return opt;
  }

  void Apply(Json& j) const {
    for (const auto& set : setters_) set(j);
  }

  CLI::App* app() const { return app_; }

 private:
  CLI::App* app_;
  std::vector<std::function<void(Json&)>> setters_;
};

void AddCommon(FlagBinder& b) {
  b.Value<uint64_t>("--seed", "/seed", "Root seed for every random substream");
  b.Value<std::string>("--out-dir", "/io/out_dir", "Directory for outputs and manifest.json");
}

void AddDataFlags(FlagBinder& b) {
  b.Value<std::string>("--data", "/data/source", "Dataset source")
      ->check(CLI::IsMember({"synth", "mnist"}));
  b.Value<std::string>("--mnist-dir", "/data/mnist_dir",
                       "Directory with the IDX files (or $PRIVFUSION_MNIST_DIR)");
  b.Value<int>("--subset", "/data/subset", "Training pool size");
  b.Value<int>("--holdout", "/data/eval_size", "Evaluation split size");
  b.Value<int>("--classes", "/data/classes", "Class count");
  b.Value<int>("--input-dim", "/data/input_dim", "Synthetic input dimension");
  b.Value<double>("--spread", "/data/spread", "Synthetic cluster spread");
  b.Value<int>("--probe-size", "/data/probe_size", "Public probe rows");
  b.Value<std::string>("--partition", "/data/partition/kind", "Split between the two owners")
      ->check(CLI::IsMember({"homogeneous", "heterogeneous"}));
  b.Value<int>("--personalized-label", "/data/partition/personalized_label",
               "Label held back from owner B in heterogeneous splits");
  b.Value<double>("--minority-fraction", "/data/partition/minority_fraction",
                  "Share of the remaining labels kept by owner A");
}

void AddModelFlags(FlagBinder& b) {
  b.List<int>("--layers", "/spec/layer_sizes", "Layer sizes, e.g. 784,32,32,10");
  b.Value<std::string>("--activation", "/spec/activation", "Hidden activation");
  b.Value<int>("--epochs", "/train/epochs", "Training epochs");
  b.Value<int>("--batch-size", "/train/batch_size", "Minibatch size");
  b.Value<double>("--lr", "/train/learning_rate", "SGD learning rate");
}

void AddPipelineFlags(FlagBinder& b) {
  b.Value<double>("--eps-a", "/pipeline/budget/eps_a", "Node-feature budget");
  b.Value<double>("--eps-w", "/pipeline/budget/eps_w", "Weight-feature budget");
  b.Value<double>("--eps-f", "/pipeline/budget/eps_f", "Exchanged-weight budget");
  b.Value<double>("--delta", "/pipeline/budget/delta", "Gaussian mechanism delta");
  b.Flag("--test-mode", "/pipeline/budget/test_mode", true,
         "Disable all noise (requires --insecure)");
  b.Value<int>("--outer-rounds", "/pipeline/solver/outer_rounds", "Matching rounds");
  b.Value<int>("--sinkhorn-iters", "/pipeline/solver/sinkhorn_iters", "Sinkhorn iterations");
  b.Flag("--spectral-init", "/pipeline/solver/spectral_init", true,
         "Start matching from the spectral relaxation");
  b.Value<std::string>("--rule", "/pipeline/fusion/rule", "Fusion rule")
      ->check(CLI::IsMember({"convex", "halved"}));
  b.Flag("--no-pfa", "/pipeline/fusion/pfa_enabled", false, "Exchange weights without noise");
  b.Flag("--no-sfu", "/pipeline/fusion/sfu_enabled", false, "Skip the erf filter");
  b.Flag("--no-sfu-rescale", "/pipeline/fusion/sfu_rescale", false,
         "Keep filtered weights in [0, 1]");
  b.List<double>("--alphas", "/pipeline/fusion/alphas", "Fusion ratios to evaluate");
  b.Value<double>("--alpha", "/pipeline/fixed_alpha", "Ratio used for the fused model");
  b.Value<double>("--sample-fraction", "/pipeline/sample_fraction",
                  "Fraction of probe rows used as node features");
}

Json LoadConfigFile(const std::string& flag_path) {
  std::string path = flag_path;
  if (path.empty()) {
    if (const char* env = std::getenv("PRIVFUSION_CONFIG")) path = env;
  }
  if (path.empty()) return Json::object();
  Json j;
  try {
    j = Json::parse(ReadText(path));
  } catch (const Json::parse_error& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file '" + path + "' must hold an object");
  if (j.contains("command") && j.contains("config")) return j["config"];
  return j;
}

class Command {
 public:
  Command(CLI::App& root, const std::string& name, const std::string& help,
          std::vector<std::string> sections)
      : app_(root.add_subcommand(name, help)), flags_(app_), sections_(std::move(sections)) {
    app_->add_option("--config", config_path_, "Config file (or $PRIVFUSION_CONFIG)");
    AddCommon(flags_);
  }
  virtual ~Command() = default;

  CLI::App* app() { return app_; }
  FlagBinder& flags() { return flags_; }

  int Execute() {
    const auto start = std::chrono::steady_clock::now();
    Json config = {{"seed", 1}, {"io", {{"out_dir", "."}}}};
    for (const auto& s : sections_) config[s] = Defaults(s.c_str());
    config.merge_patch(LoadConfigFile(config_path_));
    flags_.Apply(config);
    if (config.contains("data") && config["data"].value("source", "") == "mnist" &&
        config["data"].value("mnist_dir", "").empty()) {
      if (const char* env = std::getenv("PRIVFUSION_MNIST_DIR")) config["data"]["mnist_dir"] = env;
    }
    Validate(config);
    out_dir_ = config["io"].value("out_dir", std::string("."));
    std::filesystem::create_directories(out_dir_);

    Json manifest = {{"command", app_->get_name()}, {"version", pf_version()}, {"config", config}};
    manifest["inputs"] = Json::object();
    manifest["outputs"] = Json::array();
    manifest_ = &manifest;
    int code = kExitOk;
    std::string failure;
    try {
      code = Run(config);
    } catch (const ApiError& e) {
      failure = e.what();
      code = ExitFor(e.status);
      std::cerr << "error: " << failure << "\n";
    }
    const auto end = std::chrono::steady_clock::now();
    manifest["seeds"] = seeds_;
    manifest["exit_code"] = code;
    if (!failure.empty()) manifest["error"] = failure;
    manifest["started_at_unix"] = static_cast<int64_t>(std::time(nullptr)) -
                                  std::chrono::duration_cast<std::chrono::seconds>(end - start).count();
    manifest["wall_clock_seconds"] = std::chrono::duration<double>(end - start).count();
    WriteText(out_dir_ / "manifest.json", manifest.dump(2) + "\n");
    manifest_ = nullptr;
    return code;
  }

 protected:
  virtual void Validate(const Json& config) const { (void)config; }
  virtual int Run(const Json& config) = 0;

  virtual int ExitFor(pf_status status) const {
    switch (status) {
      case PF_INVALID_ARGUMENT:
        return kExitUsage;
      case PF_DIVERGENCE:
        return kExitDivergence;
      case PF_VERSION_MISMATCH:
      case PF_BUDGET_REFUSED:
      case PF_ARCH_MISMATCH:
      case PF_SEQUENCE_VIOLATION:
      case PF_TRANSPORT:
      case PF_DIGEST_MISMATCH:
        return kExitProtocol;
      default:
        return kExitFailure;
    }
  }

  std::filesystem::path Output(const std::string& name) {
    const auto p = out_dir_ / name;
    (*manifest_)["outputs"].push_back(p.string());
    return p;
  }

  void RecordInput(const std::string& key, const std::string& digest) {
    (*manifest_)["inputs"][key] = digest;
  }

  void RecordSeed(const std::string& name, uint64_t value) { seeds_[name] = value; }

  void RecordResult(const std::string& key, Json value) {
    (*manifest_)["results"][key] = std::move(value);
  }

  Model LoadModel(const std::string& key, const std::string& path) {
    if (path.empty()) throw UsageError("--" + key + " is required");
    pf_model* raw = nullptr;
    Check(pf_model_load(path.c_str(), &raw), "loading " + path);
    Model m(raw);
    char* digest = nullptr;
    Check(pf_model_digest(m.get(), &digest), "model digest");
    RecordInput(key + ":" + path, Take(digest));
    return m;
  }

  void SaveModel(const pf_model* m, const std::string& name) {
    Check(pf_model_save(m, Output(name).c_str()), "saving " + name);
  }

  struct Data {
    Dataset train;
    Dataset eval;
    Dataset probe;
  };

  Data LoadData(const Json& config) {
    const uint64_t seed = config["seed"].get<uint64_t>();
    pf_dataset* train = nullptr;
    pf_dataset* eval = nullptr;
    pf_dataset* probe = nullptr;
    Check(pf_dataset_load(config["data"].dump().c_str(), seed, &train, &eval, &probe), "loading data");
    Data d{Dataset(train), Dataset(eval), Dataset(probe)};
    for (const auto& [name, set] : {std::pair{"eval", d.eval.get()}, std::pair{"probe", d.probe.get()}}) {
      char* digest = nullptr;
      Check(pf_dataset_digest(set, &digest), "dataset digest");
      RecordInput(std::string("dataset:") + name, Take(digest));
    }
    return d;
  }

  CLI::App* app_;
  FlagBinder flags_;
  std::vector<std::string> sections_;
  std::string config_path_;
  std::filesystem::path out_dir_;
  Json* manifest_ = nullptr;
  Json seeds_ = Json::object();
};

void RequireBudget(const Json& config) {
  const Json& budget = config["pipeline"]["budget"];
  if (budget.value("test_mode", false)) {
    if (!config["io"].value("insecure", false)) {
      throw UsageError("--test-mode disables all privacy noise and requires --insecure");
    }
    return;
  }
  for (const char* k : {"eps_a", "eps_w", "eps_f"}) {
    if (!(budget.value(k, 0.0) > 0)) {
      throw UsageError(std::string("budget ") + k + " must be positive outside test mode");
    }
  }
}

class TrainCommand : public Command {
 public:
  explicit TrainCommand(CLI::App& root)
      : Command(root, "train", "Train the two owner models on a partitioned dataset",
                {"data", "spec", "train"}) {
    AddDataFlags(flags());
    AddModelFlags(flags());
  }

 protected:
  void Validate(const Json& config) const override {
    if (config["train"].value("epochs", 0) <= 0) throw UsageError("--epochs must be positive");
    if (config["train"].value("batch_size", 0) <= 0) throw UsageError("--batch-size must be positive");
  }

  int Run(const Json& config) override {
    const uint64_t seed = config["seed"].get<uint64_t>();
    Data data = LoadData(config);
    pf_dataset* a = nullptr;
    pf_dataset* b = nullptr;
    const uint64_t partition_seed = pf_substream_seed(seed, "partition", 0);
    RecordSeed("partition", partition_seed);
    Check(pf_dataset_partition(data.train.get(), config["data"]["partition"].dump().c_str(),
                               partition_seed, &a, &b),
          "partitioning");
    const Dataset shards[2] = {Dataset(a), Dataset(b)};
    const char* names[2] = {"model_a", "model_b"};
    for (int k = 0; k < 2; ++k) {
      Json train = config["train"];
      train["seed"] = pf_substream_seed(seed, "train", static_cast<uint64_t>(k));
      RecordSeed(std::string("train:") + names[k], train["seed"].get<uint64_t>());
      pf_model* raw = nullptr;
      Check(pf_model_train(config["spec"].dump().c_str(), train.dump().c_str(), shards[k].get(), &raw),
            std::string("training ") + names[k]);
      Model m(raw);
      SaveModel(m.get(), std::string(names[k]) + ".json");
      char* metrics = nullptr;
      Check(pf_model_evaluate(m.get(), data.eval.get(), &metrics), "evaluation");
      Json result = Json::parse(Take(metrics));
      size_t rows = 0;
      int classes = 0;
      Check(pf_dataset_info(shards[k].get(), &rows, nullptr, &classes), "dataset info");
      result["shard_rows"] = rows;
      Json counts = Json::array();
      for (int label = 0; label < classes; ++label) {
        size_t n = 0;
        Check(pf_dataset_label_count(shards[k].get(), label, &n), "label count");
        counts.push_back(n);
      }
      result["shard_label_counts"] = counts;
      std::cout << names[k] << ": rows=" << rows << " acc=" << result["acc"].get<double>() << "\n";
      RecordResult(names[k], result);
    }
    return kExitOk;
  }
};

class FuseCommand : public Command {
 public:
  explicit FuseCommand(CLI::App& root)
      : Command(root, "fuse", "Match, align and fuse two models offline",
                {"data", "pipeline"}) {
    AddDataFlags(flags());
    AddPipelineFlags(flags());
    flags().Value<std::string>("--model-a", "/io/model_a", "Initiator model file");
    flags().Value<std::string>("--model-b", "/io/model_b", "Responder model file");
    flags().Flag("--insecure", "/io/insecure", true, "Allow test mode");
  }

 protected:
  void Validate(const Json& config) const override { RequireBudget(config); }

  int Run(const Json& config) override {
    const uint64_t seed = config["seed"].get<uint64_t>();
    Model a = LoadModel("model-a", config["io"].value("model_a", std::string()));
    Model b = LoadModel("model-b", config["io"].value("model_b", std::string()));
    Data data = LoadData(config);
    const uint64_t noise_a = pf_substream_seed(seed, "party-noise", 0);
    const uint64_t noise_b = pf_substream_seed(seed, "party-noise", 1);
    RecordSeed("noise:initiator", noise_a);
    RecordSeed("noise:responder", noise_b);
    pf_model* fused = nullptr;
    char* csv = nullptr;
    char* summary = nullptr;
    Check(pf_fuse_offline(a.get(), b.get(), data.probe.get(), data.eval.get(),
                          config["pipeline"].dump().c_str(), noise_a, noise_b, &fused, &csv, &summary),
          "fusion");
    Model fused_model(fused);
    SaveModel(fused_model.get(), "fused.json");
    WriteText(Output("report.csv"), Take(csv));
    const Json s = Json::parse(Take(summary));
    WriteText(Output("summary.json"), s.dump(2) + "\n");
    const Json& best = s["report"]["best"];
    std::cout << "best alpha=" << best["alpha"].get<double>() << " acc=" << best["acc"].get<double>()
              << " top3_avg=" << s["report"]["top3_avg"].get<double>()
              << " vanilla_best=" << s["vanilla_average"]["best"]["acc"].get<double>() << "\n";
    RecordResult("fused_digest", s["fused_digest"]);
    return kExitOk;
  }
};

std::pair<std::string, uint16_t> ParseEndpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw UsageError("endpoint must be HOST:PORT, got '" + text + "'");
  int port = 0;
  try {
    port = std::stoi(text.substr(colon + 1));
  } catch (const std::exception&) {
    port = -1;
  }
  if (port < 0 || port > 65535) throw UsageError("bad port in '" + text + "'");
  return {text.substr(0, colon), static_cast<uint16_t>(port)};
}

class ProtocolCommand : public Command {
 public:
  explicit ProtocolCommand(CLI::App& root)
      : Command(root, "protocol", "Run one two-party fusion session",
                {"data", "pipeline", "party"}) {
    AddDataFlags(flags());
    AddPipelineFlags(flags());
    auto* loop = flags().Flag("--loopback", "/io/loopback", true, "Run both roles in-process");
    auto* listen = flags().Value<std::string>("--listen", "/io/listen", "Act as responder on HOST:PORT");
    auto* connect = flags().Value<std::string>("--connect", "/io/connect", "Act as initiator to HOST:PORT");
    loop->excludes(listen)->excludes(connect);
    listen->excludes(connect);
    flags().Value<std::string>("--model", "/io/model", "This party's model (initiator in loopback)");
    flags().Value<std::string>("--peer-model", "/io/peer_model", "Responder model for --loopback");
    flags().Value<std::string>("--party-id", "/party/party_id", "Identifier announced in HELLO");
    flags().Value<std::string>("--session-id", "/party/session_id", "Session identifier");
    flags().Value<double>("--max-eps-a", "/party/ceiling/eps_a", "Largest peer node budget accepted");
    flags().Value<double>("--max-eps-w", "/party/ceiling/eps_w", "Largest peer weight budget accepted");
    flags().Value<double>("--max-eps-f", "/party/ceiling/eps_f", "Largest peer exchange budget accepted");
    flags().Flag("--insecure", "/io/insecure", true, "Allow test mode on this transport");
    flags().Value<int>("--timeout-ms", "/io/timeout_ms", "Receive timeout");
  }

 protected:
  void Validate(const Json& config) const override {
    RequireBudget(config);
    const Json& io = config["io"];
    const int modes = static_cast<int>(io.value("loopback", false)) +
                      static_cast<int>(!io.value("listen", std::string()).empty()) +
                      static_cast<int>(!io.value("connect", std::string()).empty());
    if (modes != 1) throw UsageError("choose exactly one of --loopback, --listen, --connect");
  }

  int ExitFor(pf_status status) const override {
    if (status == PF_INVALID_ARGUMENT) return kExitUsage;
    if (status == PF_DIVERGENCE) return kExitDivergence;
    return kExitProtocol;
  }

  Json PartyJson(const Json& config, int index) {
    Json p = config["party"];
    p["pipeline"] = config["pipeline"];
    p["insecure"] = config["io"].value("insecure", false);
    p["noise_seed"] = pf_substream_seed(config["seed"].get<uint64_t>(), "party-noise",
                                        static_cast<uint64_t>(index));
    RecordSeed(index == 0 ? "noise:initiator" : "noise:responder", p["noise_seed"].get<uint64_t>());
    return p;
  }

  int Run(const Json& config) override {
    const Json& io = config["io"];
    const bool insecure = io.value("insecure", false);
    Model model = LoadModel("model", io.value("model", std::string()));
    Data data = LoadData(config);
    pf_model* fused = nullptr;
    char* summary = nullptr;
    pf_status status = PF_OK;
    if (io.value("loopback", false)) {
      Model peer = LoadModel("peer-model", io.value("peer_model", std::string()));
      Json pi = PartyJson(config, 0);
      Json pr = PartyJson(config, 1);
      if (pr.value("party_id", std::string()) == pi.value("party_id", std::string())) pr["party_id"] = "";
      char* ti = nullptr;
      char* tr = nullptr;
      status = pf_protocol_loopback(model.get(), peer.get(), data.probe.get(), pi.dump().c_str(),
                                    pr.dump().c_str(), insecure ? 1 : 0, &fused, &ti, &tr, &summary);
      if (ti != nullptr) WriteText(Output("transcript_initiator.jsonl"), Take(ti));
      if (tr != nullptr) WriteText(Output("transcript_responder.jsonl"), Take(tr));
    } else {
      const bool listen = !io.value("listen", std::string()).empty();
      const auto [host, port] = ParseEndpoint(io.value(listen ? "listen" : "connect", std::string()));
      const Json party = PartyJson(config, listen ? 1 : 0);
      char* transcript = nullptr;
      const int timeout = io.value("timeout_ms", 0);
      status = (listen ? pf_protocol_listen : pf_protocol_connect)(
          host.c_str(), port, model.get(), data.probe.get(), party.dump().c_str(), insecure ? 1 : 0,
          timeout, &fused, &transcript, &summary);
      if (transcript != nullptr) WriteText(Output("transcript.jsonl"), Take(transcript));
    }
    const std::string message = pf_last_error();
    Model fused_model(fused);
    Json s = summary != nullptr ? Json::parse(Take(summary)) : Json::object();
    if (!s.empty()) WriteText(Output("summary.json"), s.dump(2) + "\n");
    if (fused_model) SaveModel(fused_model.get(), "fused.json");
    RecordResult("session", s);
    if (status != PF_OK) {
      throw ApiError(status, std::string("session failed: ") + pf_status_name(status) + ": " + message);
    }
    if (s.contains("digests_agree") && !s["digests_agree"].get<bool>()) {
      throw ApiError(PF_DIGEST_MISMATCH, "fused model digests differ between the parties");
    }
    const Json& local = s.contains("initiator") ? s["initiator"] : s;
    std::cout << "session ok: fused_digest=" << local["fused_digest"].get<std::string>()
              << " epsilon_spent=" << local["epsilon_spent"].get<double>() << "\n";
    return kExitOk;
  }
};

class SweepCommand : public Command {
 public:
  explicit SweepCommand(CLI::App& root)
      : Command(root, "sweep", "Fuse over a grid of privacy budgets and seeds",
                {"data", "spec", "train", "pipeline", "sweep"}) {
    AddDataFlags(flags());
    AddModelFlags(flags());
    AddPipelineFlags(flags());
    flags().List<double>("--eps-a-grid", "/sweep/eps_a", "Node-feature budgets");
    flags().List<double>("--eps-w-grid", "/sweep/eps_w", "Weight-feature budgets");
    flags().List<double>("--eps-f-grid", "/sweep/eps_f", "Exchanged-weight budgets");
    flags().List<uint64_t>("--seeds", "/sweep/seeds", "Seeds, one fixture each");
    app()->add_option("--repetitions", repetitions_, "Use seeds 1..N");
  }

 protected:
  void Validate(const Json& config) const override {
    for (const char* k : {"eps_a", "eps_w", "eps_f", "seeds"}) {
      if (!config["sweep"].contains(k) || config["sweep"][k].empty()) {
        throw UsageError(std::string("sweep grid '") + k + "' is empty");
      }
    }
    if (repetitions_ && *repetitions_ <= 0) throw UsageError("--repetitions must be positive");
    if (config["train"].value("epochs", 0) <= 0) throw UsageError("--epochs must be positive");
  }

  int Run(const Json& config) override {
    Json sweep = config["sweep"];
    if (repetitions_) {
      sweep["seeds"] = Json::array();
      for (int s = 1; s <= *repetitions_; ++s) sweep["seeds"].push_back(s);
    }
    sweep["fixture"] = {{"data", config["data"]}, {"spec", config["spec"]}, {"train", config["train"]}};
    sweep["pipeline"] = config["pipeline"];
    RecordResult("seeds", sweep["seeds"]);
    char* csv = nullptr;
    Check(pf_sweep(sweep.dump().c_str(), &csv), "sweep");
    const std::string text = Take(csv);
    WriteText(Output("sweep.csv"), text);
    const auto rows = std::count(text.begin(), text.end(), '\n') - 1;
    std::cout << "sweep rows=" << rows << "\n";
    return kExitOk;
  }

  std::optional<int> repetitions_;
};

class AuditCommand : public Command {
 public:
  explicit AuditCommand(CLI::App& root)
      : Command(root, "audit", "Monte Carlo audit of a privacy mechanism", {}) {
    flags().Value<std::string>("--mechanism", "/audit/mechanism", "Mechanism to audit")
        ->check(CLI::IsMember({"multibit", "laplace", "rectifier", "gaussian"}));
    flags().Value<double>("--epsilon", "/audit/epsilon", "Privacy budget");
    flags().Value<int>("--m", "/audit/m", "Sampled coordinates");
    flags().Value<int>("--d", "/audit/d", "Coordinate count");
    flags().Value<double>("--scale", "/audit/scale", "Laplace scale");
    flags().Value<long>("--trials", "/audit/trials", "Monte Carlo trials");
    flags().Value<double>("--w", "/audit/w", "Rectifier input value");
    flags().Value<double>("--w-min", "/audit/w_min", "Lower clip bound");
    flags().Value<double>("--w-max", "/audit/w_max", "Upper clip bound");
    flags().Value<double>("--delta", "/audit/delta", "Gaussian delta");
    flags().Value<double>("--sensitivity", "/audit/sensitivity", "Gaussian sensitivity");
  }

 protected:
  void Validate(const Json& config) const override {
    if (!config.contains("audit")) return;
    if (config["audit"].contains("trials") && config["audit"]["trials"].get<long>() <= 0) {
      throw UsageError("--trials must be positive");
    }
  }

  int Run(const Json& config) override {
    Json params = {{"mechanism", "multibit"}, {"epsilon", std::log(3.0)}, {"m", 1}, {"d", 1},
                   {"scale", 1.0}, {"trials", 1000000}, {"w", 0.3}, {"w_min", -1.0},
                   {"w_max", 1.0}, {"delta", 1e-5}, {"sensitivity", 1.0}};
    if (config.contains("audit")) params.merge_patch(config["audit"]);
    params["seed"] = pf_substream_seed(config["seed"].get<uint64_t>(), "audit", 0);
    params["samples"] = params["trials"];
    RecordSeed("audit", params["seed"].get<uint64_t>());
    RecordResult("parameters", params);
    const std::string mechanism = params["mechanism"].get<std::string>();
    char* report = nullptr;
    Check(pf_mechanism_audit(mechanism.c_str(), params.dump().c_str(), &report), "audit");
    const Json r = Json::parse(Take(report));
    WriteText(Output("audit.json"), r.dump(2) + "\n");
    std::cout << r.dump(2) << "\n";
    return kExitOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App root{"Private two-party model fusion"};
  root.require_subcommand(1);
  root.set_version_flag("--version", std::string(pf_version()));
  TrainCommand train(root);
  FuseCommand fuse(root);
  ProtocolCommand protocol(root);
  SweepCommand sweep(root);
  AuditCommand audit(root);
  try {
    root.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return root.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return root.exit(e);
  } catch (const CLI::ParseError& e) {
    root.exit(e);
    return kExitUsage;
  }
  Command* commands[] = {&train, &fuse, &protocol, &sweep, &audit};
  try {
    for (Command* c : commands) {
      if (c->app()->parsed()) return c->Execute();
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.status == PF_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
