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

#include "ldp/budget.h"

#include <cmath>
#include <string>

#include "common/error.h"

namespace privfusion::ldp {

void PrivacyBudget::Validate() const {
  for (double e : {eps_a, eps_w, eps_f}) {
    Require(std::isfinite(e) && e >= 0, ErrorCode::kInvalidArgument,
            "privacy budgets must be finite and non-negative");
  }
  if (test_mode) return;
  Require(eps_a > 0 && eps_w > 0 && eps_f > 0, ErrorCode::kInvalidArgument,
          "privacy budgets must be positive outside test mode");
  Require(delta > 0 && delta < 1, ErrorCode::kInvalidArgument,
          "delta must lie in (0, 1)");
}

double ComposeBudget(const PrivacyBudget& b) { return b.eps_a + b.eps_w + b.eps_f; }

std::string_view MechanismName(Mechanism m) {
  switch (m) {
    case Mechanism::kNodeFeatures: return "node_features";
    case Mechanism::kWeightFeatures: return "weight_features";
    case Mechanism::kPfa: return "pfa";
  }
  return "unknown";
}

Accountant::Accountant(const PrivacyBudget& budget) : budget_(budget) {
  budget_.Validate();
}

void Accountant::Consume(Mechanism m) {
  if (counts_[Index(m)] > 0) {
    Fail(ErrorCode::kBudgetExhausted,
         "budget for " + std::string(MechanismName(m)) +
             " was already spent in this session");
  }
  ++counts_[Index(m)];
}

double Accountant::spent() const {
  if (budget_.test_mode) return 0;
  double total = 0;
  if (Consumed(Mechanism::kNodeFeatures)) total += budget_.eps_a;
  if (Consumed(Mechanism::kWeightFeatures)) total += budget_.eps_w;
  if (Consumed(Mechanism::kPfa)) total += budget_.eps_f;
  return total;
}

}  // namespace privfusion::ldp
