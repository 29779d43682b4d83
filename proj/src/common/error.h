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

#ifndef PRIVFUSION_COMMON_ERROR_H_
#define PRIVFUSION_COMMON_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace privfusion {

// Numeric values are part of the C API (see privfusion.h) and must not change.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kMalformed = 3,
  kVersionMismatch = 4,
  kDivergence = 5,
  kDegenerate = 6,
  kBudgetExhausted = 7,
  kBudgetRefused = 8,
  kArchMismatch = 9,
  kSequenceViolation = 10,
  kTransport = 11,
  kDigestMismatch = 12,
  kIo = 13,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void Require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) Fail(code, message);
}

}  // namespace privfusion

#endif  // PRIVFUSION_COMMON_ERROR_H_
