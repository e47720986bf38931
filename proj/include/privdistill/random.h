/*
 * Copyright 2026 The privdistill Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PRIVDISTILL_RANDOM_H_
#define PRIVDISTILL_RANDOM_H_

#include <cstdint>
#include <random>
#include <vector>

namespace privdistill {

// Seeded generator with platform-independent derived draws.
// std::mt19937_64's output sequence is fixed by the standard, but the
// std::*_distribution adaptors are not, so bounded draws are done here.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform integer in [0, bound). bound must be > 0.
  uint64_t UniformBelow(uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double UniformUnit() {
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
  }

  // Draws from a categorical distribution given (not necessarily normalized)
  // nonnegative weights.
  int Categorical(const std::vector<double>& weights);

  // Fisher-Yates.
  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      const size_t j = UniformBelow(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used to derive independent sub-seeds.
uint64_t MixSeed(uint64_t seed, uint64_t salt);

}  // namespace privdistill

#endif  // PRIVDISTILL_RANDOM_H_
