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

#ifndef PRIVFUSION_LDP_BUDGET_H_
#define PRIVFUSION_LDP_BUDGET_H_

#include <array>
#include <cstdint>
#include <string_view>

#include "common/rng.h"

namespace privfusion::ldp {

// Budgets for the three randomized mechanisms: Laplace on node features
// (eps_a), MultiBit on weight features (eps_w) and the Gaussian
// perturbation-filter adapter on exchanged weights (eps_f, delta).
//
// test_mode turns every mechanism into the identity. It exists for oracle
// tests only and is refused by the protocol engine unless the transport is
// explicitly marked insecure.
struct PrivacyBudget {
  double eps_a = 0.1;
  double eps_w = 0.1;
  double eps_f = 0.1;
  double delta = 1e-5;
  bool test_mode = false;

  double total() const { return eps_a + eps_w + eps_f; }
  void Validate() const;

  static PrivacyBudget TestMode() { return {0, 0, 0, 1e-5, true}; }

  friend bool operator==(const PrivacyBudget&, const PrivacyBudget&) = default;
};

// Sequential composition: eps_a + eps_w + eps_f.
double ComposeBudget(const PrivacyBudget& b);

enum class Mechanism { kNodeFeatures = 0, kWeightFeatures = 1, kPfa = 2 };
std::string_view MechanismName(Mechanism m);

// Per-session accountant. Every mechanism may spend its share of the budget
// once; a second spend throws kBudgetExhausted. Not thread-safe.
class Accountant {
 public:
  explicit Accountant(const PrivacyBudget& budget);

  void Consume(Mechanism m);
  bool Consumed(Mechanism m) const { return counts_[Index(m)] > 0; }
  int invocations(Mechanism m) const { return counts_[Index(m)]; }
  // Epsilon spent so far (0 in test mode).
  double spent() const;
  const PrivacyBudget& budget() const { return budget_; }

 private:
  static size_t Index(Mechanism m) { return static_cast<size_t>(m); }
  PrivacyBudget budget_;
  std::array<int, 3> counts_{};
};

// Randomness for every mechanism comes from substreams of one seed, keyed by
// (mechanism name, layer index):
//   "laplace"  node features of hidden layer h (index h, 0-based)
//   "multibit" weight features of weight layer p (index p, 0-based)
//   "rpu"      Gaussian noise on weight layer p
// so layers can be perturbed in any order with identical results.
struct NoiseSpec {
  uint64_t seed = 0;

  Rng Stream(std::string_view mechanism, size_t layer) const {
    return Substream(seed, mechanism, layer);
  }
};

}  // namespace privfusion::ldp

#endif  // PRIVFUSION_LDP_BUDGET_H_
