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
// Binary network checkpoints. The byte layout is documented in
// docs/checkpoint_format.md; all integers and floats are little-endian.

#ifndef MTSNN_CHECKPOINT_HPP_
#define MTSNN_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mtsnn/graph.hpp"

namespace mtsnn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> SerializeNetwork(const Network& net);
// Throws incompatible-checkpoint / checkpoint-version / corrupt-checkpoint.
Network DeserializeNetwork(std::span<const std::uint8_t> bytes);

void SaveCheckpoint(const std::filesystem::path& path, const Network& net);
Network LoadCheckpoint(const std::filesystem::path& path);

}  // namespace mtsnn

#endif  // MTSNN_CHECKPOINT_HPP_
