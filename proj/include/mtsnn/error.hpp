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
#ifndef MTSNN_ERROR_HPP_
#define MTSNN_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace mtsnn {

// Broad failure categories. They map one-to-one onto the C API status codes
// and the CLI exit codes.
enum class ErrorKind {
  kValidation = 1,  // bad config, bad argument, inconsistent shapes
  kRuntime = 2,     // numeric failure, internal invariant broken
  kIo = 3,          // missing/unreadable files, corrupt containers
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message),
        kind_(kind),
        code_(std::move(code)) {}

  ErrorKind kind() const { return kind_; }
  // Short machine-readable tag, e.g. "length-mismatch".
  const std::string& code() const { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& code,
                              const std::string& message) {
  throw Error(kind, code, message);
}

#define MTSNN_CHECK(cond, code, msg)                                        \
  do {                                                                \
    if (!(cond)) ::mtsnn::Fail(::mtsnn::ErrorKind::kValidation, code, msg); \
  } while (0)

}  // namespace mtsnn

#endif  // MTSNN_ERROR_HPP_
