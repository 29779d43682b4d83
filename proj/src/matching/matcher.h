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

#ifndef PRIVFUSION_MATCHING_MATCHER_H_
#define PRIVFUSION_MATCHING_MATCHER_H_

#include <string>
#include <vector>

#include "common/canonical.h"
#include "common/matrix.h"
#include "graph/model_graph.h"
#include "ldp/perturb.h"
#include "matching/affinity.h"
#include "matching/permutation.h"

namespace privfusion::matching {

struct SolverConfig {
  Bandwidth kernel_bandwidth = Bandwidth::Median();
  int sinkhorn_iters = 50;
  double tau_start = 1.0;
  double tau_decay = 0.7;
  double tau_floor = 0.05;
  int power_iters = 100;
  int outer_rounds = 10;
  double convergence_tol = 1e-6;
  bool spectral_init = false;

  void Validate() const;
};

Json SolverConfigToJson(const SolverConfig& c);
SolverConfig SolverConfigFromJson(const Json& j);

struct LayerAffinity {
  Matrix act_affinity;
  Matrix weight_affinity;
  Matrix merged;
};

struct LayerRoundStats {
  double sinkhorn_residual = 0;
  int sinkhorn_iterations = 0;
  double entropy = 0;
};

struct RoundDiagnostics {
  int round = 0;
  double tau = 0;
  double objective = 0;  // of this round's discretized candidate
  std::vector<LayerRoundStats> layers;
};

struct MatchResult {
  PermutationSet permutations;
  double identity_objective = 0;
  double objective = 0;
  std::vector<RoundDiagnostics> rounds;
  std::vector<LayerAffinity> affinities;  // evaluated at the final permutations

  // round,tau,objective,layer,sinkhorn_residual,sinkhorn_iterations,entropy
  std::string DiagnosticsCsv() const;
};

// Everything the solver needs, with the remote weights already rectified.
// The local side is used as is; only the remote side is perturbed.
class MatchingProblem {
 public:
  MatchingProblem(const graph::ModelGraph& local, const ldp::PerturbedGraph& remote,
                  const SolverConfig& config);

  size_t hidden_layer_count() const { return act_affinity_.size(); }
  size_t width(size_t h) const { return layer_sizes_[h + 1]; }

  // Merged affinity of hidden layer h, with the neighbouring layers' remote
  // dimensions re-expressed through the given (soft or hard) assignments.
  // assign[k] is local x remote for hidden layer k.
  LayerAffinity Layer(size_t h, const std::vector<Matrix>& assign) const;

  // sum_h <merged_h(hard neighbours), P_h>
  double Objective(const PermutationSet& perms) const;

  const Matrix& act_affinity(size_t h) const { return act_affinity_[h]; }
  const Matrix& local_nodes(size_t h) const { return local_nodes_[h]; }
  const Matrix& remote_nodes(size_t h) const { return remote_nodes_[h]; }

 private:
  std::vector<size_t> layer_sizes_;
  std::vector<Matrix> local_weights_;
  std::vector<Matrix> remote_weights_;
  std::vector<Matrix> local_nodes_;
  std::vector<Matrix> remote_nodes_;
  std::vector<Matrix> act_affinity_;
  Bandwidth bandwidth_;
};

MatchResult MatchModels(const graph::ModelGraph& local, const ldp::PerturbedGraph& remote,
                        const SolverConfig& config = {});

}  // namespace privfusion::matching

#endif  // PRIVFUSION_MATCHING_MATCHER_H_
