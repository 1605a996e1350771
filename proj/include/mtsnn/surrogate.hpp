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

#ifndef MTSNN_SURROGATE_HPP_
#define MTSNN_SURROGATE_HPP_

#include <cmath>

namespace mtsnn {

enum class SurrogateKind { kExpDecay, kFastSigmoid };

struct SurrogateSpec {
  SurrogateKind kind = SurrogateKind::kExpDecay;
  double scale = 1.0;  // sharpness a > 0

  void Validate() const;
  bool operator==(const SurrogateSpec&) const = default;
};

// Pseudo-derivative dS/dU used in place of the Heaviside's delta.
//   ExpDecay:    (1/a) exp(-|u - phi| / a)
//   FastSigmoid: 1 / (a (1 + |u - phi| / a)^2)
inline double surrogate_derivative(double u, double phi, const SurrogateSpec& spec) {
  const double d = std::fabs(u - phi) / spec.scale;
  switch (spec.kind) {
    case SurrogateKind::kFastSigmoid:
      return 1.0 / (spec.scale * (1.0 + d) * (1.0 + d));
    case SurrogateKind::kExpDecay:
    default:
      return std::exp(-d) / spec.scale;
  }
}

// Smooth spike whose exact derivative is surrogate_derivative. Only used to
// build a differentiable relaxation of the network for gradient checks.
// Ranges: ExpDecay (0, 2), FastSigmoid (-0.5, 1.5).
inline double relaxed_spike(double u, double phi, const SurrogateSpec& spec) {
  const double x = (u - phi) / spec.scale;
  switch (spec.kind) {
    case SurrogateKind::kFastSigmoid:
      return 0.5 + x / (1.0 + std::fabs(x));
    case SurrogateKind::kExpDecay:
    default:
      return x < 0.0 ? std::exp(x) : 2.0 - std::exp(-x);
  }
}

}  // namespace mtsnn

#endif  // MTSNN_SURROGATE_HPP_
