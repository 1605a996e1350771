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

// N-MNIST event files and their conversion to binned spike tensors.
//
// Each event is a 40-bit big-endian record:
//
//   byte 0      x address (0..33)
//   byte 1      y address (0..33)
//   byte 2      bit 7: polarity, bits 6..0: timestamp bits 22..16
//   bytes 3-4   timestamp bits 15..0 (microseconds)

#ifndef MTSNN_DATA_HPP_
#define MTSNN_DATA_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtsnn/spike_train.hpp"

namespace mtsnn {

inline constexpr int kSensorWidth = 34;
inline constexpr int kSensorHeight = 34;
inline constexpr int kPolarities = 2;
inline constexpr std::size_t kInputFeatures = kPolarities * kSensorWidth * kSensorHeight;
inline constexpr std::uint32_t kMaxTimestampUs = (1u << 23) - 1;
inline constexpr std::size_t kBytesPerEvent = 5;

struct Event {
  std::uint8_t x = 0;
  std::uint8_t y = 0;
  std::uint8_t polarity = 0;
  std::uint32_t t_us = 0;

  bool operator==(const Event&) const = default;
};

// Throws truncated-record / coordinate-out-of-range.
std::vector<Event> parse_nmnist_file(std::span<const std::uint8_t> bytes);
// Inverse of parse_nmnist_file. Throws coordinate-out-of-range /
// timestamp-out-of-range for events that cannot be represented.
std::vector<std::uint8_t> encode_nmnist_file(std::span<const Event> events);

std::vector<Event> ReadEventFile(const std::filesystem::path& path);
void WriteEventFile(const std::filesystem::path& path, std::span<const Event> events);

// Feature index of (polarity, y, x) in the flattened input.
inline std::uint32_t FeatureIndex(int polarity, int y, int x) {
  return static_cast<std::uint32_t>((polarity * kSensorHeight + y) * kSensorWidth + x);
}

// Binary (polarity x 34 x 34) x T tensor, stored sparsely.
class SpikeTensor {
 public:
  SpikeTensor() = default;
  SpikeTensor(SpikeTrain train, std::uint32_t bin_width_us)
      : train_(std::move(train)), bin_width_us_(bin_width_us) {}

  std::size_t t_steps() const { return train_.steps(); }
  std::uint32_t bin_width_us() const { return bin_width_us_; }
  std::size_t count() const { return train_.nnz(); }
  bool at(int polarity, int y, int x, std::size_t step) const;

  const SpikeTrain& train() const { return train_; }

 private:
  SpikeTrain train_;
  std::uint32_t bin_width_us_ = 1000;
};

// Bins events into t_steps bins of bin_width_us; an entry is 1 iff at least
// one event of that polarity/pixel falls in the bin. Later events are dropped.
SpikeTensor bin_events(std::span<const Event> events, std::size_t t_steps,
                       std::uint32_t bin_width_us);

struct TaskLabels {
  int task1 = 0;  // digit
  int task2 = 0;  // 0 = even, 1 = odd
};

TaskLabels derive_labels(int digit);

enum class Split { kTrain, kTest };
std::string SplitName(Split split);

struct SampleRef {
  std::filesystem::path path;
  int digit = 0;
  int parity = 0;

  bool operator==(const SampleRef&) const = default;
};

struct DatasetIndex {
  std::filesystem::path root;
  Split split = Split::kTrain;
  std::vector<SampleRef> samples;

  std::size_t size() const { return samples.size(); }
  bool operator==(const DatasetIndex&) const = default;
};

// Indexes <root>/<split>/<digit>/*.bin. With a limit, returns a class-balanced
// subsample chosen deterministically from `seed`.
DatasetIndex load_dataset(const std::filesystem::path& root, Split split,
                          std::optional<std::size_t> limit, std::uint64_t seed);

struct LabeledSample {
  SpikeTensor tensor;
  int digit = 0;
  int parity = 0;
};

LabeledSample LoadSample(const SampleRef& ref, std::size_t t_steps,
                         std::uint32_t bin_width_us);

}  // namespace mtsnn

#endif  // MTSNN_DATA_HPP_
