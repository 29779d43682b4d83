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

#ifndef PRIVFUSION_COMMON_MATRIX_H_
#define PRIVFUSION_COMMON_MATRIX_H_

#include <Eigen/Dense>

namespace privfusion {

// All numerics are 64-bit. Row-major so that serialized "data" arrays and
// in-memory order coincide.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline bool AllFinite(const Matrix& m) { return m.allFinite(); }

}  // namespace privfusion

#endif  // PRIVFUSION_COMMON_MATRIX_H_
