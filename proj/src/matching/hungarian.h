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

#ifndef PRIVFUSION_MATCHING_HUNGARIAN_H_
#define PRIVFUSION_MATCHING_HUNGARIAN_H_

#include "common/matrix.h"
#include "matching/permutation.h"

namespace privfusion::matching {

struct Assignment {
  Permutation col_of_row;
  double cost = 0;
};

// Minimum-cost perfect assignment of a square cost matrix (Kuhn-Munkres with
// potentials, O(n^3)). Among equal-cost optima the lexicographically smallest
// col_of_row is returned. Maximize an affinity by passing its negation.
Assignment Hungarian(const Matrix& cost);

}  // namespace privfusion::matching

#endif  // PRIVFUSION_MATCHING_HUNGARIAN_H_
