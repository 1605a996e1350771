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

#ifndef MTSNN_TESTS_TOY_HPP_
#define MTSNN_TESTS_TOY_HPP_

#include <random>
#include <vector>

#include "mtsnn/graph.hpp"
#include "mtsnn/train.hpp"

namespace mtsnn::testing {

// Digit d drives channels [2d, 2d+2) densely plus sparse background.
inline std::vector<SampleData> ToyData(std::size_t per_digit, std::size_t steps, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::bernoulli_distribution strong(0.6), weak(0.03);
  std::vector<SampleData> out;
  for (std::size_t r = 0; r < per_digit; ++r) {
    for (int d = 0; d < 10; ++d) {
      SpikeTrain tr(20);
      for (std::size_t t = 0; t < steps; ++t) {
        for (std::uint32_t c = 0; c < 20; ++c) {
          const bool own = c / 2 == static_cast<std::uint32_t>(d);
          if (own ? strong(gen) : weak(gen)) tr.Push(c, 1.0);
        }
        tr.EndStep();
      }
      out.push_back({std::move(tr), d, d % 2});
    }
  }
  return out;
}

inline Architecture ToyArch(std::size_t tasks) {
  Architecture a;
  a.input_size = 20;
  a.feature_sizes = {24};
  a.label_hidden = {};
  a.task_hidden = {6};
  a.num_tasks = tasks;
  a.init_gain = 3.0;
  return a;
}

}  // namespace mtsnn::testing

#endif  // MTSNN_TESTS_TOY_HPP_
