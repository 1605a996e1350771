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
#include "mtsnn/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "mtsnn/error.hpp"

namespace mtsnn {
namespace {

constexpr char kMagic[8] = {'M', 'T', 'S', 'N', 'N', 'C', 'K', 'P'};

class Writer {
 public:
  void Bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void U8(std::uint8_t v) { out_.push_back(v); }
  void U32(std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void U64(std::uint64_t v) {
    for (int k = 0; k < 8; ++k) out_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  void Need(std::size_t n) const {
    if (n > in_.size() - pos_) {
      Fail(ErrorKind::kIo, "corrupt-checkpoint", "checkpoint is truncated");
    }
  }
  std::uint8_t U8() {
    Need(1);
    return in_[pos_++];
  }
  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * k);
    return v;
  }
  std::uint64_t U64() {
    Need(8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * k);
    return v;
  }
  double F64() { return std::bit_cast<double>(U64()); }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void WriteMatrix(Writer& w, const Matrix& m) {
  for (double v : m.data()) w.F64(v);
}

Matrix ReadMatrix(Reader& r, std::uint64_t rows, std::uint64_t cols) {
  const std::uint64_t left = r.remaining() / 8;
  if (rows != 0 && cols > left / rows) {
    Fail(ErrorKind::kIo, "corrupt-checkpoint", "checkpoint is truncated");
  }
  Matrix m(rows, cols);
  for (double& v : m.data()) v = r.F64();
  return m;
}

}  // namespace

std::vector<std::uint8_t> SerializeNetwork(const Network& net) {
  net.spec.Validate();
  Writer w;
  w.Bytes(kMagic, sizeof(kMagic));
  w.U32(kCheckpointVersion);
  w.U32(8);
  w.U64(net.seed);
  w.U64(net.spec.num_labels_task1);
  w.U64(net.spec.num_labels_task2);
  w.U32(static_cast<std::uint32_t>(net.spec.feature_block.size()));
  w.U32(static_cast<std::uint32_t>(net.spec.label_block.size()));
  w.U32(static_cast<std::uint32_t>(net.spec.task_block.size()));
  for (Block b : {Block::kFeature, Block::kLabel, Block::kTask}) {
    for (const LayerSpec& layer : net.spec.block(b)) {
      w.U64(layer.in_size);
      w.U64(layer.out_size);
      w.F64(layer.neuron.tau_mem);
      w.F64(layer.neuron.tau_syn);
      w.F64(layer.neuron.dt);
      w.F64(layer.neuron.threshold);
      w.F64(layer.neuron.i_ext);
      w.U8(layer.neuron.reset_mode == ResetMode::kSubtractThreshold ? 1 : 0);
      w.U8(layer.recurrent ? 1 : 0);
      WriteMatrix(w, layer.weights);
      if (layer.recurrent) WriteMatrix(w, *layer.recurrent);
    }
  }
  auto& bytes = w.bytes();
  const auto crc = static_cast<std::uint32_t>(
      crc32(0L, bytes.data(), static_cast<uInt>(bytes.size())));
  w.U32(crc);
  return std::move(bytes);
}

Network DeserializeNetwork(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    Fail(ErrorKind::kIo, "incompatible-checkpoint", "not an MT-SNN checkpoint (bad magic)");
  }
  Reader r(bytes);
  for (std::size_t k = 0; k < sizeof(kMagic); ++k) r.U8();
  const std::uint32_t version = r.U32();
  if (version != kCheckpointVersion) {
    Fail(ErrorKind::kIo, "checkpoint-version",
         "checkpoint format version " + std::to_string(version) +
             " is not supported (this build reads version " +
             std::to_string(kCheckpointVersion) + ")");
  }
  const auto body = bytes.first(bytes.size() - 4);
  Reader tail(bytes.last(4));
  const std::uint32_t stored_crc = tail.U32();
  if (stored_crc !=
      static_cast<std::uint32_t>(crc32(0L, body.data(), static_cast<uInt>(body.size())))) {
    Fail(ErrorKind::kIo, "corrupt-checkpoint", "checksum mismatch");
  }
  const std::uint32_t precision = r.U32();
  if (precision != 8) {
    Fail(ErrorKind::kIo, "incompatible-checkpoint",
         "unsupported value precision " + std::to_string(precision));
  }
  Network net;
  net.seed = r.U64();
  net.spec.num_labels_task1 = r.U64();
  net.spec.num_labels_task2 = r.U64();
  const std::uint32_t counts[3] = {r.U32(), r.U32(), r.U32()};
  for (Block b : {Block::kFeature, Block::kLabel, Block::kTask}) {
    for (std::uint32_t l = 0; l < counts[static_cast<int>(b)]; ++l) {
      LayerSpec layer;
      layer.in_size = r.U64();
      layer.out_size = r.U64();
      layer.neuron.tau_mem = r.F64();
      layer.neuron.tau_syn = r.F64();
      layer.neuron.dt = r.F64();
      layer.neuron.threshold = r.F64();
      layer.neuron.i_ext = r.F64();
      layer.neuron.reset_mode =
          r.U8() == 1 ? ResetMode::kSubtractThreshold : ResetMode::kSubtractSpike;
      const bool has_recurrent = r.U8() == 1;
      layer.weights = ReadMatrix(r, layer.out_size, layer.in_size);
      if (has_recurrent) layer.recurrent = ReadMatrix(r, layer.out_size, layer.out_size);
      net.spec.block(b).push_back(std::move(layer));
    }
  }
  if (r.pos() != bytes.size() - 4) {
    Fail(ErrorKind::kIo, "corrupt-checkpoint", "unexpected data after the last layer");
  }
  try {
    net.spec.Validate();
  } catch (const Error& e) {
    Fail(ErrorKind::kIo, "corrupt-checkpoint", e.what());
  }
  return net;
}

void SaveCheckpoint(const std::filesystem::path& path, const Network& net) {
  const auto bytes = SerializeNetwork(net);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorKind::kIo, "unwritable-file", path.string());
}

Network LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "unreadable-file", path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return DeserializeNetwork(bytes);
}

}  // namespace mtsnn
