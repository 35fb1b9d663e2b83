// Copyright 2026 The OEF Toolkit Authors
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

#ifndef OEF_RNG_HPP_
#define OEF_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "oef/types.hpp"

namespace oef {

// Deterministic RNG with explicitly-specified sampling primitives. The
// standard distributions are implementation-defined, so every sampling
// routine the toolkit relies on for byte-stable outputs lives here.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed == 0 ? 0x9e3779b97f4a7c15ULL : seed) {
    // splitmix warmup decorrelates small seeds.
    for (int i = 0; i < 4; ++i) Next();
  }

  uint64_t Next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1).
  double Uniform() { return std::ldexp(static_cast<double>(Next() >> 11), -53); }

  // Uniform integer in [0, n) without modulo bias.
  uint64_t UniformBelow(uint64_t n) {
    Check(n > 0, "rng: empty range");
    uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
      uint64_t r = Next();
      if (r >= threshold) return r % n;
    }
  }

  // Index sampled from unnormalized nonnegative weights.
  int SampleIndex(std::span<const double> weights) {
    double total = 0;
    for (double w : weights) total += w;
    Check(total > 0, "rng: zero-mass distribution");
    double u = Uniform() * total;
    double acc = 0;
    for (size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = UniformBelow(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_;
};

// Stable seed derivation for parallel workers / per-episode streams.
inline uint64_t DeriveSeed(uint64_t seed, uint64_t stream) {
  Rng r(seed ^ (0x51ed2701a2b9e4d5ULL + stream * 0x2545f4914f6cdd1dULL));
  return r.Next();
}

}  // namespace oef

#endif  // OEF_RNG_HPP_
