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

#include "matching/matcher.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "common/error.h"
#include "matching/hungarian.h"
#include "matching/sinkhorn.h"
#include "matching/spectral.h"

namespace privfusion::matching {
namespace {

constexpr Eigen::Index kMaxSpectralWidth = 64;

PermutationSet Discretize(const std::vector<Matrix>& soft) {
  PermutationSet set;
  for (const auto& s : soft) set.perms.push_back(Hungarian(-s).col_of_row);
  return set;
}

}  // namespace

void SolverConfig::Validate() const {
  Require(kernel_bandwidth.median || kernel_bandwidth.value > 0,
          ErrorCode::kInvalidArgument, "kernel_bandwidth must be positive or median");
  Require(sinkhorn_iters > 0 && power_iters > 0 && outer_rounds > 0,
          ErrorCode::kInvalidArgument, "iteration counts must be positive");
  Require(tau_start > 0 && tau_decay > 0 && tau_decay <= 1 && tau_floor > 0,
          ErrorCode::kInvalidArgument, "temperature schedule must be positive with decay <= 1");
  Require(convergence_tol > 0, ErrorCode::kInvalidArgument, "convergence_tol must be positive");
}

Json SolverConfigToJson(const SolverConfig& c) {
  Json j;
  if (c.kernel_bandwidth.median) {
    j["kernel_bandwidth"] = "median";
  } else {
    j["kernel_bandwidth"] = c.kernel_bandwidth.value;
  }
  j["sinkhorn_iters"] = c.sinkhorn_iters;
  j["sinkhorn_tau"] = {{"start", c.tau_start}, {"decay", c.tau_decay}, {"floor", c.tau_floor}};
  j["power_iters"] = c.power_iters;
  j["outer_rounds"] = c.outer_rounds;
  j["convergence_tol"] = c.convergence_tol;
  j["spectral_init"] = c.spectral_init;
  return j;
}

SolverConfig SolverConfigFromJson(const Json& j) {
  SolverConfig c;
  Require(j.is_object(), ErrorCode::kMalformed, "solver config must be an object");
  try {
    if (j.contains("kernel_bandwidth")) {
      const auto& b = j["kernel_bandwidth"];
      if (b.is_string()) {
        Require(b.get<std::string>() == "median", ErrorCode::kInvalidArgument,
                "kernel_bandwidth must be a number or \"median\"");
        c.kernel_bandwidth = Bandwidth::Median();
      } else {
        c.kernel_bandwidth = Bandwidth::Fixed(b.get<double>());
      }
    }
    c.sinkhorn_iters = j.value("sinkhorn_iters", c.sinkhorn_iters);
    if (j.contains("sinkhorn_tau")) {
      const auto& t = j["sinkhorn_tau"];
      c.tau_start = t.value("start", c.tau_start);
      c.tau_decay = t.value("decay", c.tau_decay);
      c.tau_floor = t.value("floor", c.tau_floor);
    }
    c.power_iters = j.value("power_iters", c.power_iters);
    c.outer_rounds = j.value("outer_rounds", c.outer_rounds);
    c.convergence_tol = j.value("convergence_tol", c.convergence_tol);
    c.spectral_init = j.value("spectral_init", c.spectral_init);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kMalformed, std::string("solver config: ") + e.what());
  }
  c.Validate();
  return c;
}

std::string MatchResult::DiagnosticsCsv() const {
  std::string out = "round,tau,objective,layer,sinkhorn_residual,sinkhorn_iterations,entropy\n";
  char buf[256];
  for (const auto& r : rounds) {
    for (size_t h = 0; h < r.layers.size(); ++h) {
      const auto& l = r.layers[h];
      std::snprintf(buf, sizeof buf, "%d,%.6g,%.10g,%zu,%.6g,%d,%.6g\n", r.round, r.tau,
                    r.objective, h + 1, l.sinkhorn_residual, l.sinkhorn_iterations, l.entropy);
      out += buf;
    }
  }
  return out;
}

MatchingProblem::MatchingProblem(const graph::ModelGraph& local,
                                 const ldp::PerturbedGraph& remote,
                                 const SolverConfig& config)
    : layer_sizes_(local.layer_sizes), bandwidth_(config.kernel_bandwidth) {
  config.Validate();
  remote.Validate();
  Require(local.layer_sizes == remote.layer_sizes, ErrorCode::kArchMismatch,
          "local and remote graphs have different layer sizes");
  Require(local.node_features.size() == remote.node_features.size() &&
              local.weight_features.size() == remote.weights.size(),
          ErrorCode::kArchMismatch, "local and remote graphs have different depth");
  local_weights_ = local.weight_features;
  for (const auto& w : remote.weights) remote_weights_.push_back(w.Estimate());
  for (size_t h = 0; h < local.node_features.size(); ++h) {
    Require(local.node_features[h].cols() == remote.node_features[h].cols(),
            ErrorCode::kArchMismatch,
            "node features were computed on probe sets of different sizes");
    local_nodes_.push_back(local.node_features[h]);
    remote_nodes_.push_back(remote.node_features[h]);
    const Matrix act = GaussianKernelAffinity(local_nodes_[h], remote_nodes_[h], bandwidth_);
    Require(act.allFinite(), ErrorCode::kDegenerate,
            "activation affinity of hidden layer " + std::to_string(h + 1) + " is not finite");
    act_affinity_.push_back(act);
  }
}

LayerAffinity MatchingProblem::Layer(size_t h, const std::vector<Matrix>& assign) const {
  const size_t hidden = hidden_layer_count();
  // incoming: rows of weights[h], columns re-expressed through layer h-1
  const Matrix& w_in_local = local_weights_[h];
  Matrix w_in_remote = remote_weights_[h];
  if (h > 0) w_in_remote = w_in_remote * assign[h - 1].transpose();
  // outgoing: columns of weights[h+1], rows re-expressed through layer h+1
  const Matrix& w_out_local = local_weights_[h + 1];
  Matrix w_out_remote = remote_weights_[h + 1];
  if (h + 1 < hidden) w_out_remote = assign[h + 1] * w_out_remote;

  LayerAffinity out;
  out.act_affinity = act_affinity_[h];
  out.weight_affinity = GaussianKernelAffinity(w_in_local, w_in_remote, bandwidth_) +
                        GaussianKernelAffinity(w_out_local.transpose(),
                                               w_out_remote.transpose(), bandwidth_);
  Require(out.weight_affinity.allFinite(), ErrorCode::kDegenerate,
          "weight affinity of hidden layer " + std::to_string(h + 1) + " is not finite");
  out.merged = MergeAffinity(out.weight_affinity, out.act_affinity);
  return out;
}

double MatchingProblem::Objective(const PermutationSet& perms) const {
  perms.Validate(layer_sizes_);
  const auto mats = perms.Matrices();
  double total = 0;
  for (size_t h = 0; h < hidden_layer_count(); ++h) {
    total += Layer(h, mats).merged.cwiseProduct(mats[h]).sum();
  }
  return total;
}

MatchResult MatchModels(const graph::ModelGraph& local, const ldp::PerturbedGraph& remote,
                        const SolverConfig& config) {
  const MatchingProblem problem(local, remote, config);
  const size_t hidden = problem.hidden_layer_count();

  MatchResult result;
  result.permutations = PermutationSet::Identity(local.layer_sizes);
  result.identity_objective = problem.Objective(result.permutations);
  result.objective = result.identity_objective;
  if (hidden == 0) return result;

  std::vector<Matrix> soft;
  for (size_t h = 0; h < hidden; ++h) {
    const auto n = static_cast<Eigen::Index>(problem.width(h));
    soft.push_back(Matrix::Constant(n, n, 1.0 / static_cast<double>(n)));
  }
  if (config.spectral_init) {
    for (size_t h = 0; h < hidden; ++h) {
      const auto n = static_cast<Eigen::Index>(problem.width(h));
      Require(n <= kMaxSpectralWidth, ErrorCode::kInvalidArgument,
              "spectral initialization supports widths up to " +
                  std::to_string(kMaxSpectralWidth));
      const Matrix merged = problem.Layer(h, soft).merged;
      const Matrix op =
          PairwiseOperator(merged, PairwiseDistances(problem.local_nodes(h), problem.local_nodes(h)),
                           PairwiseDistances(problem.remote_nodes(h), problem.remote_nodes(h)));
      const auto relaxed = SpectralRelax(op, n, n, config.power_iters, config.convergence_tol);
      // keep every entry strictly positive so the projection is well defined
      const Matrix seeded = relaxed.soft.array() + 1e-12;
      soft[h] = SinkhornProject(seeded, config.sinkhorn_iters).plan;
    }
  }

  double tau = config.tau_start;
  for (int round = 0; round < config.outer_rounds; ++round) {
    RoundDiagnostics diag;
    diag.round = round + 1;
    diag.tau = tau;
    std::vector<Matrix> next(hidden);
    double change = 0;
    for (size_t h = 0; h < hidden; ++h) {
      const Matrix merged = problem.Layer(h, soft).merged;
      const auto sk = SinkhornFromScores(merged, tau, config.sinkhorn_iters);
      change = std::max(change, (sk.plan - soft[h]).cwiseAbs().maxCoeff());
      next[h] = sk.plan;
      diag.layers.push_back({sk.residual, sk.iterations, AssignmentEntropy(sk.plan)});
    }
    soft = std::move(next);
    const PermutationSet candidate = Discretize(soft);
    diag.objective = problem.Objective(candidate);
    if (diag.objective > result.objective) {
      result.objective = diag.objective;
      result.permutations = candidate;
    }
    result.rounds.push_back(diag);
    tau = std::max(tau * config.tau_decay, config.tau_floor);
    if (change < config.convergence_tol) break;
  }

  // Coordinate-wise polish: re-solve each layer exactly given hard neighbours.
  for (size_t sweep = 0; sweep < 2 * hidden; ++sweep) {
    bool improved = false;
    for (size_t h = 0; h < hidden; ++h) {
      const auto mats = result.permutations.Matrices();
      PermutationSet trial = result.permutations;
      trial.perms[h] = Hungarian(-problem.Layer(h, mats).merged).col_of_row;
      if (trial == result.permutations) continue;
      const double value = problem.Objective(trial);
      if (value > result.objective) {
        result.objective = value;
        result.permutations = std::move(trial);
        improved = true;
      }
    }
    if (!improved) break;
  }

  const auto mats = result.permutations.Matrices();
  for (size_t h = 0; h < hidden; ++h) result.affinities.push_back(problem.Layer(h, mats));
  return result;
}

}  // namespace privfusion::matching
