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

#include "matching/permutation.h"

#include <numeric>
#include <string>

#include "common/error.h"

namespace privfusion::matching {

bool IsBijection(const Permutation& p) {
  std::vector<bool> seen(p.size(), false);
  for (int v : p) {
    if (v < 0 || static_cast<size_t>(v) >= p.size() || seen[static_cast<size_t>(v)]) {
      return false;
    }
    seen[static_cast<size_t>(v)] = true;
  }
  return true;
}

Permutation IdentityPermutation(size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

Permutation Inverse(const Permutation& p) {
  Require(IsBijection(p), ErrorCode::kInvalidArgument, "not a permutation");
  Permutation inv(p.size());
  for (size_t i = 0; i < p.size(); ++i) inv[static_cast<size_t>(p[i])] = static_cast<int>(i);
  return inv;
}

Permutation Compose(const Permutation& a, const Permutation& b) {
  Require(a.size() == b.size(), ErrorCode::kDimensionMismatch,
          "cannot compose permutations of different sizes");
  Permutation out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = b[static_cast<size_t>(a[i])];
  return out;
}

Matrix PermutationMatrix(const Permutation& p) {
  const auto n = static_cast<Eigen::Index>(p.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, p[static_cast<size_t>(i)]) = 1.0;
  return m;
}

PermutationSet PermutationSet::Identity(const std::vector<size_t>& layer_sizes) {
  PermutationSet s;
  for (size_t p = 1; p + 1 < layer_sizes.size(); ++p) {
    s.perms.push_back(IdentityPermutation(layer_sizes[p]));
  }
  return s;
}

PermutationSet PermutationSet::Inverse() const {
  PermutationSet s;
  for (const auto& p : perms) s.perms.push_back(matching::Inverse(p));
  return s;
}

std::vector<Matrix> PermutationSet::Matrices() const {
  std::vector<Matrix> out;
  for (const auto& p : perms) out.push_back(PermutationMatrix(p));
  return out;
}

void PermutationSet::Validate(const std::vector<size_t>& layer_sizes) const {
  Require(layer_sizes.size() >= 2 && perms.size() == layer_sizes.size() - 2,
          ErrorCode::kDimensionMismatch,
          "permutation set has the wrong number of hidden layers");
  for (size_t h = 0; h < perms.size(); ++h) {
    Require(perms[h].size() == layer_sizes[h + 1], ErrorCode::kDimensionMismatch,
            "permutation for hidden layer " + std::to_string(h + 1) +
                " has the wrong size");
    Require(IsBijection(perms[h]), ErrorCode::kInvalidArgument,
            "permutation for hidden layer " + std::to_string(h + 1) +
                " is not a bijection");
  }
}

}  // namespace privfusion::matching
