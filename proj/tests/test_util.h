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

#ifndef PRIVFUSION_TESTS_TEST_UTIL_H_
#define PRIVFUSION_TESTS_TEST_UTIL_H_

#include <gtest/gtest.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "common/error.h"
#include "common/matrix.h"
#include "common/rng.h"
#include "matching/permutation.h"
#include "nn/mlp.h"
#include "nn/train.h"

namespace privfusion::testing {

inline Matrix UniformMatrix(Eigen::Index rows, Eigen::Index cols, uint64_t seed,
                            double lo = 0.0, double hi = 1.0) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = lo + (hi - lo) * rng.Uniform();
  }
  return m;
}

inline nn::MlpModel RandomModel(std::vector<size_t> sizes, uint64_t seed, bool use_bias = false) {
  nn::MlpSpec spec{std::move(sizes)};
  spec.use_bias = use_bias;
  return nn::InitializeModel(spec, seed);
}

inline matching::Permutation RandomPermutation(size_t n, uint64_t seed) {
  Rng rng(seed);
  matching::Permutation p = matching::IdentityPermutation(n);
  for (size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.UniformInt(i)]);
  return p;
}

inline matching::PermutationSet RandomPermutations(const std::vector<size_t>& sizes,
                                                   uint64_t seed) {
  matching::PermutationSet s;
  for (size_t h = 1; h + 1 < sizes.size(); ++h) s.perms.push_back(RandomPermutation(sizes[h], seed + h));
  return s;
}

// Runs f and reports the privfusion error code it threw, if any.
inline std::optional<ErrorCode> CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

#define EXPECT_PF_ERROR(statement, expected_code) \
  EXPECT_EQ(::privfusion::testing::CodeOf([&] { (void)(statement); }), (expected_code))

}  // namespace privfusion::testing

#endif  // PRIVFUSION_TESTS_TEST_UTIL_H_
