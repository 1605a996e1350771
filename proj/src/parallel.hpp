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
#ifndef MTSNN_SRC_PARALLEL_HPP_
#define MTSNN_SRC_PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace mtsnn::internal {

// Calls fn(i) for i in [0, n) on up to `jobs` threads, contiguous chunks per
// thread. Results must go to per-index slots; the first exception is
// rethrown on the calling thread.
template <typename Fn>
void ParallelFor(std::size_t n, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  const std::size_t chunk = (n + jobs - 1) / jobs;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = w * chunk; i < std::min(n, (w + 1) * chunk); ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace mtsnn::internal

#endif  // MTSNN_SRC_PARALLEL_HPP_
