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

// Run configuration: a flat key/value store with per-key provenance.
//
// File format, one entry per line:
//
//   # comment
//   key = value
//
// Command-line flags use the same names in kebab-case (phi2 -> --phi2,
// batch_size -> --batch-size). Precedence is flag > file > profile default.

#ifndef MTSNN_CONFIG_HPP_
#define MTSNN_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtsnn/graph.hpp"
#include "mtsnn/train.hpp"

namespace mtsnn {

enum class Source { kDefault = 0, kFile = 1, kFlag = 2, kEnv = 3 };
std::string SourceName(Source s);

struct KeySpec {
  const char* name;
  const char* full_default;  // nullptr: unset
  const char* desk_default;  // nullptr: same as full_default
  const char* help;
};

std::span<const KeySpec> ConfigKeys();
std::string KebabCase(const std::string& key);

struct DataSettings {
  std::filesystem::path root;
  std::optional<std::size_t> train_limit;
  std::optional<std::size_t> test_limit;
  std::size_t t_steps = 300;
  std::uint32_t bin_width_us = 1000;
  std::uint64_t seed = 0;
};

class CliConfig {
 public:
  // Populates defaults; data_root comes from MTSNN_DATA_ROOT when set.
  CliConfig();

  // Throws unknown-key.
  void Set(const std::string& key, const std::string& value, Source source);
  // Parses "key = value" lines; throws on syntax errors and unknown keys.
  void LoadFile(const std::filesystem::path& path);

  std::optional<std::string> Get(const std::string& key) const;
  Source SourceOf(const std::string& key) const;
  std::string profile() const;

  // Throws invalid-config naming the first bad key.
  void Validate() const;

  TrainConfig train_config() const;
  Architecture architecture() const;
  DataSettings data_settings() const;
  std::size_t seeds() const;
  std::size_t eval_every() const;
  std::vector<double> values() const;

  // Resolved "key = value  # source" listing, sorted by key, with a version
  // header line.
  std::string Serialize(const std::string& version) const;

 private:
  struct Entry {
    std::optional<std::string> value;
    Source source = Source::kDefault;
  };
  const std::string* Raw(const std::string& key) const;
  double Number(const std::string& key) const;
  std::size_t Count(const std::string& key) const;
  bool Flag(const std::string& key) const;
  std::optional<std::size_t> OptionalCount(const std::string& key) const;
  std::vector<std::size_t> Sizes(const std::string& key) const;

  std::map<std::string, Entry> entries_;
};

// Parses "1.5,2,3" into doubles. Throws invalid-config.
std::vector<double> ParseValueList(const std::string& text);

}  // namespace mtsnn

#endif  // MTSNN_CONFIG_HPP_
