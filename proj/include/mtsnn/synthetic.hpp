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

// Synthetic N-MNIST look-alike data for tests and CI.
//
// Each sample is a stroke-drawn digit with a random elastic/affine
// perturbation, viewed by a simulated event camera that follows the same
// three-saccade triangular motion as the real recordings. Events are emitted
// whenever a pixel's log intensity moves one contrast step away from its
// last reference level, plus uniform background noise.

#ifndef MTSNN_SYNTHETIC_HPP_
#define MTSNN_SYNTHETIC_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mtsnn/data.hpp"
#include "mtsnn/random.hpp"

namespace mtsnn {

struct FixtureOptions {
  std::size_t train_per_digit = 100;
  std::size_t test_per_digit = 50;
  std::uint64_t seed = 1;
  double distortion = 1.0;           // scales every per-sample perturbation
  double noise_events_per_ms = 0.5;  // background activity
  double contrast_step = 0.2;        // log-intensity change per event
  std::uint32_t duration_us = 300000;
};

std::vector<Event> SynthesizeDigit(int digit, const FixtureOptions& options, Rng& rng);

// Writes <root>/{train,test}/<digit>/NNNNN.bin and a checksum manifest.
// Returns the number of files written.
std::size_t GenerateFixtures(const std::filesystem::path& root,
                             const FixtureOptions& options);

}  // namespace mtsnn

#endif  // MTSNN_SYNTHETIC_HPP_
