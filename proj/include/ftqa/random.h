// Copyright 2026 The ftqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FTQA_RANDOM_H_
#define FTQA_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace ftqa {

// Seed for a named sub-stream of a run seed. Every consumer of randomness
// (scorer sampling, model init, shuffling, synthetic data) draws from its own
// stream so adding draws in one place never perturbs another.
uint64_t DeriveSeed(uint64_t seed, std::string_view stream);

// Small wrapper over mt19937_64 with distribution code that does not depend
// on the standard library implementation.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}
  Rng(uint64_t seed, std::string_view stream) : engine_(DeriveSeed(seed, stream)) {}

  uint64_t Next() { return engine_(); }
  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n). n must be positive.
  size_t Below(size_t n);
  bool Bernoulli(double p) { return Uniform() < p; }

  template <typename T>
  void Shuffle(std::vector<T> &items) {
    for (size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[Below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// 64-bit FNV-1a, used for config fingerprints.
uint64_t Fingerprint(std::string_view data);

}  // namespace ftqa

#endif  // FTQA_RANDOM_H_
