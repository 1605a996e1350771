// Copyright 2026 The MT-SNN Authors
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

#ifndef MTSNN_RANDOM_HPP_
#define MTSNN_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace mtsnn {

// std::mt19937_64 is fully specified by the standard, the distributions are
// not. Everything that must be reproducible across toolchains (weights,
// shuffles, task draws, fixtures) goes through these helpers instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n). Lemire's multiply-shift with rejection.
  std::uint64_t Below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const unsigned __int128 m =
          static_cast<unsigned __int128>(engine_()) * n;
      if (static_cast<std::uint64_t>(m) >= threshold) {
        return static_cast<std::uint64_t>(m >> 64);
      }
    }
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  // Standard normal via Box-Muller; one value per call.
  double Normal();

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(Below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed from a base seed and a salt, so that
// e.g. weight init and task selection do not share a sequence.
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t salt);

}  // namespace mtsnn

#endif  // MTSNN_RANDOM_HPP_
