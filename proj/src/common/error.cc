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

#include "common/error.h"

namespace privfusion {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kMalformed: return "malformed";
    case ErrorCode::kVersionMismatch: return "version_mismatch";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kBudgetExhausted: return "budget_exhausted";
    case ErrorCode::kBudgetRefused: return "budget_refused";
    case ErrorCode::kArchMismatch: return "arch_mismatch";
    case ErrorCode::kSequenceViolation: return "sequence_violation";
    case ErrorCode::kTransport: return "transport";
    case ErrorCode::kDigestMismatch: return "digest_mismatch";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace privfusion
