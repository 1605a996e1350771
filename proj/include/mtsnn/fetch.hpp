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

// Dataset acquisition and integrity checks.
//
// A data root carries MANIFEST.sha256 with one "<hex digest>  <relative
// path>" line per event file (sha256sum format, sorted by path). The
// manifest is written when a tree is created (download or fixtures) and
// checked by `fetch-data --verify-only`.

#ifndef MTSNN_FETCH_HPP_
#define MTSNN_FETCH_HPP_

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace mtsnn {

inline constexpr const char* kManifestName = "MANIFEST.sha256";

std::string Sha256Hex(const std::filesystem::path& file);

// Hashes every *.bin below root/{train,test} and writes the manifest.
// Returns the number of entries.
std::size_t WriteManifest(const std::filesystem::path& root);

struct VerifyReport {
  std::size_t checked = 0;
  std::vector<std::string> mismatched;  // relative paths
  std::vector<std::string> missing;     // listed but absent
  bool ok() const { return mismatched.empty() && missing.empty(); }
};

using StatusSink = std::function<void(const std::string& path, const std::string& status)>;

// Throws missing-directory / missing-manifest.
VerifyReport VerifyTree(const std::filesystem::path& root, const StatusSink& sink = {});

// Downloads url to dest. Throws network-failure.
void DownloadFile(const std::string& url, const std::filesystem::path& dest);

// Extracts a (non-zip64) zip archive. Returns the number of files written.
std::size_t ExtractZip(const std::filesystem::path& archive,
                       const std::filesystem::path& dest);

// Downloads the two archives of the published release, extracts them, maps
// the Train/Test folders onto root/{train,test} and writes the manifest.
void FetchDataset(const std::filesystem::path& root, const std::string& train_url,
                  const std::string& test_url, const StatusSink& sink = {});

}  // namespace mtsnn

#endif  // MTSNN_FETCH_HPP_
