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

#ifndef PRIVFUSION_MATCHING_PERMUTATION_H_
#define PRIVFUSION_MATCHING_PERMUTATION_H_

#include <vector>

#include "common/matrix.h"

namespace privfusion::matching {

using Permutation = std::vector<int>;

bool IsBijection(const Permutation& p);
Permutation IdentityPermutation(size_t n);
Permutation Inverse(const Permutation& p);
// (Compose(a, b))[i] = b[a[i]]
Permutation Compose(const Permutation& a, const Permutation& b);
// P[i][p[i]] = 1
Matrix PermutationMatrix(const Permutation& p);

// One permutation per hidden layer; input and output layers are always the
// identity and are not stored. perms[h][i] is the index of the remote neuron
// matched to local neuron i in hidden layer h + 1, so applying the set to the
// remote model puts its neurons in the local order.
struct PermutationSet {
  std::vector<Permutation> perms;

  static PermutationSet Identity(const std::vector<size_t>& layer_sizes);
  PermutationSet Inverse() const;
  std::vector<Matrix> Matrices() const;
  void Validate(const std::vector<size_t>& layer_sizes) const;

  friend bool operator==(const PermutationSet&, const PermutationSet&) = default;
};

}  // namespace privfusion::matching

#endif  // PRIVFUSION_MATCHING_PERMUTATION_H_
