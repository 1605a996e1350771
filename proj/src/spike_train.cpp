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
#include "mtsnn/spike_train.hpp"

#include "mtsnn/error.hpp"

namespace mtsnn {

std::vector<double> SpikeTrain::Dense() const {
  std::vector<double> out(steps_ * width_, 0.0);
  for (std::size_t t = 0; t < steps_; ++t) {
    const auto idx = indices(t);
    const auto val = values(t);
    for (std::size_t k = 0; k < idx.size(); ++k) out[t * width_ + idx[k]] = val[k];
  }
  return out;
}

SpikeTrain SpikeTrain::FromDense(std::span<const double> dense, std::size_t width,
                                 std::size_t steps) {
  MTSNN_CHECK(dense.size() == width * steps, "length-mismatch",
              "dense buffer does not match width x steps");
  SpikeTrain out(width);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t c = 0; c < width; ++c) {
      const double v = dense[t * width + c];
      if (v != 0.0) out.Push(static_cast<std::uint32_t>(c), v);
    }
    out.EndStep();
  }
  return out;
}

}  // namespace mtsnn
