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

#ifndef PRIVFUSION_PRIVFUSION_H_
#define PRIVFUSION_PRIVFUSION_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define PF_API __attribute__((visibility("default")))
#else
#define PF_API
#endif

// Status codes. Values are stable.
typedef enum pf_status {
  PF_OK = 0,
  PF_INVALID_ARGUMENT = 1,
  PF_DIMENSION_MISMATCH = 2,
  PF_MALFORMED = 3,
  PF_VERSION_MISMATCH = 4,
  PF_DIVERGENCE = 5,
  PF_DEGENERATE = 6,
  PF_BUDGET_EXHAUSTED = 7,
  PF_BUDGET_REFUSED = 8,
  PF_ARCH_MISMATCH = 9,
  PF_SEQUENCE_VIOLATION = 10,
  PF_TRANSPORT = 11,
  PF_DIGEST_MISMATCH = 12,
  PF_IO = 13,
  PF_INTERNAL = 99
} pf_status;

typedef struct pf_dataset pf_dataset;
typedef struct pf_model pf_model;

// Message of the last failing call on this thread ("" if none). Valid until
// the next call on the same thread.
PF_API const char* pf_last_error(void);
PF_API const char* pf_status_name(pf_status status);
PF_API const char* pf_version(void);

// Every char** output is a NUL-terminated string owned by the caller.
PF_API void pf_string_free(char* s);

// Seed of the named substream `index` under `seed`.
PF_API uint64_t pf_substream_seed(uint64_t seed, const char* name, uint64_t index);

// Default configuration of one section as canonical JSON. Sections: "data",
// "spec", "train", "pipeline", "party", "sweep".
PF_API pf_status pf_default_config(const char* section, char** json);

// ---- datasets -------------------------------------------------------------

PF_API pf_status pf_dataset_load_idx(const char* images_path, const char* labels_path,
                                     int class_count, pf_dataset** out);
PF_API pf_status pf_dataset_synth_blobs(int class_count, int per_class, int input_dim,
                                        double spread, uint64_t seed, pf_dataset** out);
// Training pool, evaluation split and public probe from a data config
// document (source, mnist_dir, subset, eval_size, classes, input_dim, spread,
// probe_size, partition). Any output pointer may be NULL.
PF_API pf_status pf_dataset_load(const char* data_config_json, uint64_t seed,
                                 pf_dataset** train, pf_dataset** eval, pf_dataset** probe);
// plan_json: {"kind": "homogeneous" | "heterogeneous", "personalized_label",
// "minority_fraction"}.
PF_API pf_status pf_dataset_partition(const pf_dataset* data, const char* plan_json,
                                      uint64_t seed, pf_dataset** shard_a, pf_dataset** shard_b);
PF_API pf_status pf_dataset_info(const pf_dataset* data, size_t* rows, size_t* input_dim,
                                 int* class_count);
PF_API pf_status pf_dataset_label_count(const pf_dataset* data, int label, size_t* count);
PF_API pf_status pf_dataset_digest(const pf_dataset* data, char** hex);
PF_API void pf_dataset_free(pf_dataset* data);

// ---- models ---------------------------------------------------------------

// spec_json: {"layer_sizes": [...], "activation": "relu" | "tanh",
// "use_bias": bool}; train_json: {"epochs", "batch_size", "learning_rate",
// "seed"}.
PF_API pf_status pf_model_train(const char* spec_json, const char* train_json,
                                const pf_dataset* data, pf_model** out);
PF_API pf_status pf_model_load(const char* path, pf_model** out);
PF_API pf_status pf_model_save(const pf_model* model, const char* path);
PF_API pf_status pf_model_encode(const pf_model* model, char** text);
PF_API pf_status pf_model_decode(const char* text, pf_model** out);
PF_API pf_status pf_model_digest(const pf_model* model, char** hex);
// Metrics document: acc, ma_f1, w_f1, ma_rec, w_rec, ma_prec, w_prec.
PF_API pf_status pf_model_evaluate(const pf_model* model, const pf_dataset* data,
                                   char** metrics_json);
// Functionally identical copy with every hidden layer shuffled by a seeded
// permutation.
PF_API pf_status pf_model_shuffle(const pf_model* model, uint64_t seed, pf_model** out);
PF_API void pf_model_free(pf_model* model);

// ---- pipelines ------------------------------------------------------------

// Offline two-party fusion (a is the initiator). eval may be NULL, in which
// case no sweep report is produced and *report_csv is set to NULL. The
// summary document carries the sweep summary, baselines, matching
// objectives and the fused digest.
PF_API pf_status pf_fuse_offline(const pf_model* a, const pf_model* b, const pf_dataset* probe,
                                 const pf_dataset* eval, const char* pipeline_json,
                                 uint64_t noise_seed_a, uint64_t noise_seed_b, pf_model** fused,
                                 char** report_csv, char** summary_json);

// party_json: {"party_id", "session_id", "pipeline": {...}, "noise_seed",
// "ceiling": {"eps_a", "eps_w", "eps_f"}, "insecure"}; the role is implied by
// the call. Transcripts (JSON lines) and summaries are produced even when the
// session fails, in which case the failure code is returned.
PF_API pf_status pf_protocol_loopback(const pf_model* initiator, const pf_model* responder,
                                      const pf_dataset* probe, const char* initiator_json,
                                      const char* responder_json, int insecure_transport,
                                      pf_model** fused, char** initiator_transcript,
                                      char** responder_transcript, char** summary_json);
PF_API pf_status pf_protocol_listen(const char* host, uint16_t port, const pf_model* model,
                                    const pf_dataset* probe, const char* party_json,
                                    int insecure_transport, int timeout_ms, pf_model** fused,
                                    char** transcript, char** summary_json);
PF_API pf_status pf_protocol_connect(const char* host, uint16_t port, const pf_model* model,
                                     const pf_dataset* probe, const char* party_json,
                                     int insecure_transport, int timeout_ms, pf_model** fused,
                                     char** transcript, char** summary_json);
PF_API pf_status pf_multiparty(const pf_model* const* models, size_t count,
                               const pf_dataset* probe, const char* pipeline_json,
                               uint64_t seed, int insecure, pf_model** fused,
                               char** summary_json);

// Budget grid sweep; long-format CSV
// eps_a,eps_w,eps_f,seed,best_acc,best_alpha,top3_avg.
PF_API pf_status pf_sweep(const char* sweep_json, char** csv);

// mechanism: "multibit" {epsilon, m, d, trials, seed}, "laplace" {scale,
// samples, seed}, "rectifier" {w, epsilon, m, d, w_min, w_max, trials, seed}
// or "gaussian" {epsilon, delta, sensitivity}.
PF_API pf_status pf_mechanism_audit(const char* mechanism, const char* params_json,
                                    char** report_json);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // PRIVFUSION_PRIVFUSION_H_
