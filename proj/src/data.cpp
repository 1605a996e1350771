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
#include "mtsnn/data.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <string>

#include "mtsnn/error.hpp"
#include "mtsnn/random.hpp"

namespace mtsnn {
namespace fs = std::filesystem;

std::vector<Event> parse_nmnist_file(std::span<const std::uint8_t> bytes) {
  MTSNN_CHECK(bytes.size() % kBytesPerEvent == 0, "truncated-record",
              "event stream length " + std::to_string(bytes.size()) +
                  " is not a multiple of 5");
  std::vector<Event> events;
  events.reserve(bytes.size() / kBytesPerEvent);
  for (std::size_t off = 0; off < bytes.size(); off += kBytesPerEvent) {
    const std::uint8_t* rec = bytes.data() + off;
    Event e;
    e.x = rec[0];
    e.y = rec[1];
    e.polarity = static_cast<std::uint8_t>(rec[2] >> 7);
    e.t_us = (static_cast<std::uint32_t>(rec[2] & 0x7F) << 16) |
             (static_cast<std::uint32_t>(rec[3]) << 8) | rec[4];
    MTSNN_CHECK(e.x < kSensorWidth && e.y < kSensorHeight, "coordinate-out-of-range",
                "event " + std::to_string(off / kBytesPerEvent) + " at (" +
                    std::to_string(e.x) + ", " + std::to_string(e.y) +
                    ") lies outside the 34x34 sensor");
    events.push_back(e);
  }
  return events;
}

std::vector<std::uint8_t> encode_nmnist_file(std::span<const Event> events) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(events.size() * kBytesPerEvent);
  for (const Event& e : events) {
    MTSNN_CHECK(e.x < kSensorWidth && e.y < kSensorHeight && e.polarity <= 1,
                "coordinate-out-of-range", "event cannot be encoded");
    MTSNN_CHECK(e.t_us <= kMaxTimestampUs, "timestamp-out-of-range",
                "timestamp " + std::to_string(e.t_us) + " exceeds 23 bits");
    bytes.push_back(e.x);
    bytes.push_back(e.y);
    bytes.push_back(static_cast<std::uint8_t>((e.polarity << 7) | (e.t_us >> 16)));
    bytes.push_back(static_cast<std::uint8_t>((e.t_us >> 8) & 0xFF));
    bytes.push_back(static_cast<std::uint8_t>(e.t_us & 0xFF));
  }
  return bytes;
}

std::vector<Event> ReadEventFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "unreadable-file", path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) Fail(ErrorKind::kIo, "unreadable-file", path.string());
  try {
    return parse_nmnist_file(bytes);
  } catch (const Error& e) {
    Fail(ErrorKind::kIo, e.code(), path.string() + ": " + e.what());
  }
}

void WriteEventFile(const fs::path& path, std::span<const Event> events) {
  const auto bytes = encode_nmnist_file(events);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorKind::kIo, "unwritable-file", path.string());
}

bool SpikeTensor::at(int polarity, int y, int x, std::size_t step) const {
  const auto idx = train_.indices(step);
  return std::binary_search(idx.begin(), idx.end(), FeatureIndex(polarity, y, x));
}

SpikeTensor bin_events(std::span<const Event> events, std::size_t t_steps,
                       std::uint32_t bin_width_us) {
  MTSNN_CHECK(t_steps >= 1, "invalid-config", "t_steps must be >= 1");
  MTSNN_CHECK(bin_width_us > 0, "invalid-config", "bin width must be positive");
  std::vector<std::uint8_t> grid(t_steps * kInputFeatures, 0);
  for (const Event& e : events) {
    if (e.x >= kSensorWidth || e.y >= kSensorHeight || e.polarity > 1) continue;
    const std::size_t bin = e.t_us / bin_width_us;
    if (bin >= t_steps) continue;
    grid[bin * kInputFeatures + FeatureIndex(e.polarity, e.y, e.x)] = 1;
  }
  SpikeTrain train(kInputFeatures);
  for (std::size_t t = 0; t < t_steps; ++t) {
    const std::uint8_t* row = grid.data() + t * kInputFeatures;
    for (std::size_t c = 0; c < kInputFeatures; ++c) {
      if (row[c]) train.Push(static_cast<std::uint32_t>(c), 1.0);
    }
    train.EndStep();
  }
  return SpikeTensor(std::move(train), bin_width_us);
}

TaskLabels derive_labels(int digit) {
  MTSNN_CHECK(digit >= 0 && digit <= 9, "out-of-range-digit",
              "digit must be 0..9, got " + std::to_string(digit));
  return {digit, digit % 2};
}

std::string SplitName(Split split) { return split == Split::kTrain ? "train" : "test"; }

DatasetIndex load_dataset(const fs::path& root, Split split,
                          std::optional<std::size_t> limit, std::uint64_t seed) {
  const fs::path base = root / SplitName(split);
  std::error_code ec;
  if (!fs::is_directory(base, ec)) {
    Fail(ErrorKind::kIo, "missing-directory", base.string());
  }
  std::vector<std::vector<fs::path>> per_digit(10);
  for (int d = 0; d < 10; ++d) {
    const fs::path dir = base / std::to_string(d);
    if (!fs::is_directory(dir, ec)) Fail(ErrorKind::kIo, "missing-directory", dir.string());
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      if (entry.is_regular_file() && entry.path().extension() == ".bin") {
        per_digit[d].push_back(entry.path());
      }
    }
    if (ec) Fail(ErrorKind::kIo, "unreadable-file", dir.string() + ": " + ec.message());
    std::sort(per_digit[d].begin(), per_digit[d].end());
  }

  if (limit) {
    Rng rng(DeriveSeed(seed, 0xDA7A));
    for (int d = 0; d < 10; ++d) {
      const std::size_t want = *limit / 10 + (static_cast<std::size_t>(d) < *limit % 10 ? 1 : 0);
      auto& files = per_digit[d];
      rng.Shuffle(std::span<fs::path>(files));
      if (files.size() > want) files.resize(want);
      std::sort(files.begin(), files.end());
    }
  }

  DatasetIndex index;
  index.root = root;
  index.split = split;
  for (int d = 0; d < 10; ++d) {
    const TaskLabels labels = derive_labels(d);
    for (auto& p : per_digit[d]) index.samples.push_back({p, labels.task1, labels.task2});
  }
  return index;
}

LabeledSample LoadSample(const SampleRef& ref, std::size_t t_steps,
                         std::uint32_t bin_width_us) {
  const auto events = ReadEventFile(ref.path);
  return {bin_events(events, t_steps, bin_width_us), ref.digit, ref.parity};
}

}  // namespace mtsnn
