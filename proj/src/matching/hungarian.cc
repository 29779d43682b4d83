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

#include "matching/hungarian.h"

#include <cmath>
#include <limits>
#include <vector>

#include "common/error.h"

namespace privfusion::matching {
namespace {

// Rewrites an optimal matching into the lexicographically smallest optimal one.
// Optimal matchings are exactly the perfect matchings of the tight-edge graph
// under the final dual potentials, so the search never leaves that graph.
class LexicographicRefiner {
 public:
  LexicographicRefiner(std::vector<std::vector<int>> tight, Permutation row_to_col)
      : tight_(std::move(tight)),
        row_to_col_(std::move(row_to_col)),
        col_to_row_(row_to_col_.size()) {
    for (size_t r = 0; r < row_to_col_.size(); ++r) {
      col_to_row_[static_cast<size_t>(row_to_col_[r])] = static_cast<int>(r);
    }
  }

  Permutation Run() {
    const int n = static_cast<int>(row_to_col_.size());
    for (int i = 0; i < n; ++i) {
      for (int j : tight_[static_cast<size_t>(i)]) {
        if (j == row_to_col_[static_cast<size_t>(i)]) break;
        const int owner = col_to_row_[static_cast<size_t>(j)];
        if (owner < i) continue;  // held by a row that is already final
        if (TryReassign(i, j, owner)) break;
      }
    }
    return row_to_col_;
  }

 private:
  bool TryReassign(int row, int col, int owner) {
    const Permutation saved_rows = row_to_col_;
    const Permutation saved_cols = col_to_row_;
    const int freed = row_to_col_[static_cast<size_t>(row)];
    row_to_col_[static_cast<size_t>(row)] = col;
    col_to_row_[static_cast<size_t>(col)] = row;
    col_to_row_[static_cast<size_t>(freed)] = -1;
    row_to_col_[static_cast<size_t>(owner)] = -1;
    frozen_below_ = row;
    visited_.assign(row_to_col_.size(), false);
    visited_[static_cast<size_t>(col)] = true;
    if (Augment(owner)) return true;
    row_to_col_ = saved_rows;
    col_to_row_ = saved_cols;
    return false;
  }

  bool Augment(int r) {
    for (int c : tight_[static_cast<size_t>(r)]) {
      if (visited_[static_cast<size_t>(c)]) continue;
      visited_[static_cast<size_t>(c)] = true;
      const int holder = col_to_row_[static_cast<size_t>(c)];
      if (holder == -1 || (holder > frozen_below_ && Augment(holder))) {
        row_to_col_[static_cast<size_t>(r)] = c;
        col_to_row_[static_cast<size_t>(c)] = r;
        return true;
      }
    }
    return false;
  }

  std::vector<std::vector<int>> tight_;
  Permutation row_to_col_;
  Permutation col_to_row_;
  std::vector<bool> visited_;
  int frozen_below_ = 0;
};

}  // namespace

Assignment Hungarian(const Matrix& cost) {
  Require(cost.rows() == cost.cols(), ErrorCode::kDimensionMismatch,
          "assignment needs a square cost matrix");
  Require(cost.allFinite(), ErrorCode::kInvalidArgument, "assignment costs must be finite");
  const int n = static_cast<int>(cost.rows());
  if (n == 0) return {};

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<size_t>(n) + 1, 0), v(static_cast<size_t>(n) + 1, 0);
  std::vector<int> p(static_cast<size_t>(n) + 1, 0), way(static_cast<size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<size_t>(n) + 1, kInf);
    std::vector<bool> used(static_cast<size_t>(n) + 1, false);
    do {
      used[static_cast<size_t>(j0)] = true;
      const int i0 = p[static_cast<size_t>(j0)];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(p[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<size_t>(j0)];
      p[static_cast<size_t>(j0)] = p[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  Permutation row_to_col(static_cast<size_t>(n));
  for (int j = 1; j <= n; ++j) row_to_col[static_cast<size_t>(p[static_cast<size_t>(j)] - 1)] = j - 1;

  const double scale = 1.0 + cost.cwiseAbs().maxCoeff();
  const double tol = 1e-9 * scale;
  std::vector<std::vector<int>> tight(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double reduced = cost(i, j) - u[static_cast<size_t>(i) + 1] - v[static_cast<size_t>(j) + 1];
      if (std::abs(reduced) <= tol) tight[static_cast<size_t>(i)].push_back(j);
    }
  }
  Assignment out;
  out.col_of_row = LexicographicRefiner(std::move(tight), std::move(row_to_col)).Run();
  for (int i = 0; i < n; ++i) out.cost += cost(i, out.col_of_row[static_cast<size_t>(i)]);
  return out;
}

}  // namespace privfusion::matching
