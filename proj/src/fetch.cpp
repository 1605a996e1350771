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
#include "mtsnn/fetch.hpp"

#include <curl/curl.h>
#include <openssl/evp.h>
#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "mtsnn/data.hpp"
#include "mtsnn/error.hpp"

namespace mtsnn {
namespace fs = std::filesystem;
namespace {

std::vector<fs::path> EventFiles(const fs::path& root) {
  std::vector<fs::path> files;
  for (Split split : {Split::kTrain, Split::kTest}) {
    const fs::path base = root / SplitName(split);
    if (!fs::is_directory(base)) continue;
    for (const auto& entry : fs::recursive_directory_iterator(base)) {
      if (entry.is_regular_file() && entry.path().extension() == ".bin") {
        files.push_back(fs::relative(entry.path(), root));
      }
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::uint16_t Le16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }
std::uint32_t Le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::vector<unsigned char> ReadAt(std::ifstream& in, std::uint64_t offset, std::size_t n,
                                  const fs::path& archive) {
  std::vector<unsigned char> buf(n);
  in.seekg(static_cast<std::streamoff>(offset));
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
  if (!in) Fail(ErrorKind::kIo, "corrupt-archive", archive.string());
  return buf;
}

std::vector<unsigned char> Inflate(const std::vector<unsigned char>& packed,
                                   std::size_t expected, const std::string& name) {
  std::vector<unsigned char> out(expected);
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) {
    Fail(ErrorKind::kRuntime, "inflate-failed", name);
  }
  zs.next_in = const_cast<Bytef*>(packed.data());
  zs.avail_in = static_cast<uInt>(packed.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || zs.total_out != expected) {
    Fail(ErrorKind::kIo, "corrupt-archive", "cannot inflate " + name);
  }
  return out;
}

// Finds the extracted split folder ("Train"/"train") below dir.
fs::path FindSplitDir(const fs::path& dir, const std::string& name) {
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_directory()) continue;
    std::string leaf = entry.path().filename().string();
    std::transform(leaf.begin(), leaf.end(), leaf.begin(), ::tolower);
    if (leaf == name && fs::is_directory(entry.path() / "0")) return entry.path();
  }
  Fail(ErrorKind::kIo, "missing-directory",
       "archive does not contain a '" + name + "' folder with digit subfolders");
}

}  // namespace

std::string Sha256Hex(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "unreadable-file", file.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                               &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int k = 0; k < len; ++k) {
    hex.push_back(kHex[md[k] >> 4]);
    hex.push_back(kHex[md[k] & 15]);
  }
  return hex;
}

std::size_t WriteManifest(const fs::path& root) {
  const auto files = EventFiles(root);
  std::ofstream out(root / kManifestName, std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "unwritable-file", (root / kManifestName).string());
  for (const auto& rel : files) {
    out << Sha256Hex(root / rel) << "  " << rel.generic_string() << "\n";
  }
  return files.size();
}

VerifyReport VerifyTree(const fs::path& root, const StatusSink& sink) {
  if (!fs::is_directory(root)) Fail(ErrorKind::kIo, "missing-directory", root.string());
  std::ifstream in(root / kManifestName);
  if (!in) {
    Fail(ErrorKind::kIo, "missing-manifest", (root / kManifestName).string());
  }
  VerifyReport report;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto sep = line.find("  ");
    if (sep == std::string::npos) {
      Fail(ErrorKind::kIo, "corrupt-manifest", "malformed line: " + line);
    }
    const std::string digest = line.substr(0, sep);
    const std::string rel = line.substr(sep + 2);
    ++report.checked;
    std::string status = "ok";
    if (!fs::is_regular_file(root / rel)) {
      report.missing.push_back(rel);
      status = "missing";
    } else if (Sha256Hex(root / rel) != digest) {
      report.mismatched.push_back(rel);
      status = "checksum-mismatch";
    }
    if (sink) sink(rel, status);
  }
  return report;
}

void DownloadFile(const std::string& url, const fs::path& dest) {
  static const CURLcode init = curl_global_init(CURL_GLOBAL_DEFAULT);
  if (init != CURLE_OK) Fail(ErrorKind::kIo, "network-failure", "curl init failed");
  if (dest.has_parent_path()) fs::create_directories(dest.parent_path());
  FILE* fp = std::fopen(dest.string().c_str(), "wb");
  if (fp == nullptr) Fail(ErrorKind::kIo, "unwritable-file", dest.string());
  CURL* curl = curl_easy_init();
  curl_easy_setopt(curl, CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl, CURLOPT_WRITEDATA, fp);
  curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl, CURLOPT_FAILONERROR, 1L);
  const CURLcode rc = curl_easy_perform(curl);
  curl_easy_cleanup(curl);
  std::fclose(fp);
  if (rc != CURLE_OK) {
    fs::remove(dest);
    Fail(ErrorKind::kIo, "network-failure", url + ": " + curl_easy_strerror(rc));
  }
}

std::size_t ExtractZip(const fs::path& archive, const fs::path& dest) {
  std::ifstream in(archive, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "unreadable-file", archive.string());
  in.seekg(0, std::ios::end);
  const std::uint64_t size = static_cast<std::uint64_t>(in.tellg());
  const std::size_t tail_len = static_cast<std::size_t>(std::min<std::uint64_t>(size, 65557));
  const auto tail = ReadAt(in, size - tail_len, tail_len, archive);
  std::size_t eocd = std::string::npos;
  for (std::size_t k = tail_len >= 22 ? tail_len - 22 + 1 : 0; k-- > 0;) {
    if (Le32(&tail[k]) == 0x06054b50) {
      eocd = k;
      break;
    }
  }
  if (eocd == std::string::npos) Fail(ErrorKind::kIo, "corrupt-archive", archive.string());
  const std::uint16_t entries = Le16(&tail[eocd + 10]);
  const std::uint32_t cd_size = Le32(&tail[eocd + 12]);
  const std::uint32_t cd_offset = Le32(&tail[eocd + 16]);
  if (entries == 0xFFFF || cd_offset == 0xFFFFFFFF) {
    Fail(ErrorKind::kIo, "unsupported-archive", "zip64 archives are not supported");
  }
  const auto cd = ReadAt(in, cd_offset, cd_size, archive);
  std::size_t pos = 0, written = 0;
  for (std::uint16_t e = 0; e < entries; ++e) {
    if (pos + 46 > cd.size() || Le32(&cd[pos]) != 0x02014b50) {
      Fail(ErrorKind::kIo, "corrupt-archive", archive.string());
    }
    const std::uint16_t method = Le16(&cd[pos + 10]);
    const std::uint32_t packed_size = Le32(&cd[pos + 20]);
    const std::uint32_t plain_size = Le32(&cd[pos + 24]);
    const std::uint16_t name_len = Le16(&cd[pos + 28]);
    const std::uint16_t extra_len = Le16(&cd[pos + 30]);
    const std::uint16_t comment_len = Le16(&cd[pos + 32]);
    const std::uint32_t local = Le32(&cd[pos + 42]);
    const std::string name(reinterpret_cast<const char*>(&cd[pos + 46]), name_len);
    pos += 46 + name_len + extra_len + comment_len;

    const fs::path rel = fs::path(name).lexically_normal();
    if (rel.is_absolute() || (!rel.empty() && *rel.begin() == "..")) {
      Fail(ErrorKind::kIo, "unsafe-archive", "entry escapes destination: " + name);
    }
    if (!name.empty() && name.back() == '/') {
      fs::create_directories(dest / rel);
      continue;
    }
    const auto lh = ReadAt(in, local, 30, archive);
    if (Le32(lh.data()) != 0x04034b50) Fail(ErrorKind::kIo, "corrupt-archive", name);
    const std::uint64_t data_at = local + 30ull + Le16(&lh[26]) + Le16(&lh[28]);
    auto packed = ReadAt(in, data_at, packed_size, archive);
    std::vector<unsigned char> plain;
    if (method == 0) {
      plain = std::move(packed);
    } else if (method == 8) {
      plain = Inflate(packed, plain_size, name);
    } else {
      Fail(ErrorKind::kIo, "unsupported-archive",
           "compression method " + std::to_string(method) + " in " + name);
    }
    const fs::path out_path = dest / rel;
    fs::create_directories(out_path.parent_path());
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(plain.data()),
              static_cast<std::streamsize>(plain.size()));
    if (!out) Fail(ErrorKind::kIo, "unwritable-file", out_path.string());
    ++written;
  }
  return written;
}

void FetchDataset(const fs::path& root, const std::string& train_url,
                  const std::string& test_url, const StatusSink& sink) {
  const fs::path staging = root / ".staging";
  fs::create_directories(staging);
  for (const auto& [url, split] :
       {std::pair{train_url, Split::kTrain}, std::pair{test_url, Split::kTest}}) {
    const std::string name = SplitName(split);
    const fs::path archive = staging / (name + ".zip");
    DownloadFile(url, archive);
    if (sink) sink(archive.filename().string(), "downloaded");
    const fs::path unpacked = staging / name;
    ExtractZip(archive, unpacked);
    const fs::path found = FindSplitDir(unpacked, name);
    fs::remove_all(root / name);
    fs::rename(found, root / name);
    if (sink) sink(name, "extracted");
  }
  fs::remove_all(staging);
  const std::size_t n = WriteManifest(root);
  if (sink) sink(kManifestName, std::to_string(n) + " files hashed");
}

}  // namespace mtsnn
