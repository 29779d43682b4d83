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

#ifndef PRIVFUSION_COMMON_RNG_H_
#define PRIVFUSION_COMMON_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace privfusion {

// Seeded random stream with a documented, library-independent sampling
// discipline. The engine is std::mt19937_64 (its output sequence is fixed by
// the C++ standard); every derived variate below is computed from raw 64-bit
// words so results do not depend on the standard library's distributions.
//
//   Uniform()      ((x >> 11) + 0.5) * 2^-53, strictly inside (0, 1)
//   UniformInt(n)  rejection sampling on x, no modulo bias
//   Gaussian()     Box-Muller cosine branch from two Uniform() draws
//   Laplace(b)     inverse CDF: -b * sign(u - 1/2) * ln(1 - 2|u - 1/2|)
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }
  double Uniform();
  uint64_t UniformInt(uint64_t n);
  double Gaussian();
  double Laplace(double scale);

 private:
  std::mt19937_64 engine_;
};

// Inverse CDF of the zero-mean Laplace distribution with the given scale.
double LaplaceInverseCdf(double u, double scale);

uint64_t SplitMix64(uint64_t x);
uint64_t Fnv1a64(std::string_view text);

// Substream seed: SplitMix64(SplitMix64(seed ^ Fnv1a64(name)) + index).
uint64_t SubstreamSeed(uint64_t seed, std::string_view name, uint64_t index);

inline Rng Substream(uint64_t seed, std::string_view name, uint64_t index = 0) {
  return Rng(SubstreamSeed(seed, name, index));
}

}  // namespace privfusion

#endif  // PRIVFUSION_COMMON_RNG_H_
