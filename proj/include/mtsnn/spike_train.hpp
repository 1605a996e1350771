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

#ifndef MTSNN_SPIKE_TRAIN_HPP_
#define MTSNN_SPIKE_TRAIN_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace mtsnn {

// Per-step sparse activity of `width` channels over `steps` time steps,
// stored step-major in CSR form. Binary trains store value 1.0 for every
// entry; relaxed (smoothed) trains carry real values.
class SpikeTrain {
 public:
  SpikeTrain() : offsets_(1, 0) {}
  explicit SpikeTrain(std::size_t width) : width_(width), offsets_(1, 0) {}

  std::size_t width() const { return width_; }
  std::size_t steps() const { return steps_; }
  std::size_t nnz() const { return index_.size(); }

  // Entries are appended to the open step; EndStep closes it. Indices
  // within a step must be ascending.
  void Push(std::uint32_t channel, double value) {
    index_.push_back(channel);
    value_.push_back(value);
  }
  void EndStep() {
    offsets_.push_back(static_cast<std::uint32_t>(index_.size()));
    ++steps_;
  }

  std::span<const std::uint32_t> indices(std::size_t step) const {
    return {index_.data() + offsets_[step], offsets_[step + 1] - offsets_[step]};
  }
  std::span<const double> values(std::size_t step) const {
    return {value_.data() + offsets_[step], offsets_[step + 1] - offsets_[step]};
  }

  // Dense copy, steps x width.
  std::vector<double> Dense() const;
  static SpikeTrain FromDense(std::span<const double> dense, std::size_t width,
                              std::size_t steps);

  bool operator==(const SpikeTrain&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t steps_ = 0;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> index_;
  std::vector<double> value_;
};

}  // namespace mtsnn

#endif  // MTSNN_SPIKE_TRAIN_HPP_
