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

// Discrete-time current-based leaky integrate-and-fire dynamics.
//
// For a layer with state (U[n], I[n], S[n]) one step computes
//
//   U[n+1] = alpha * U[n] + I[n] - r * S[n]
//   I[n+1] = beta * I[n] + ff_drive + rec_drive + i_ext
//   S[n+1] = 1 if U[n+1] >= threshold else 0
//
// with alpha = exp(-dt / tau_mem), beta = exp(-dt / tau_syn), and r = 1
// (SubtractSpike) or r = threshold (SubtractThreshold). The weighted sums
// ff_drive = W * x and rec_drive = V * S[n] are computed by the caller.

#ifndef MTSNN_LIF_HPP_
#define MTSNN_LIF_HPP_

#include <span>
#include <vector>

namespace mtsnn {

enum class ResetMode { kSubtractSpike, kSubtractThreshold };

struct NeuronConfig {
  double tau_mem = 10.0;
  double tau_syn = 5.0;
  double dt = 1.0;
  double threshold = 1.25;
  double i_ext = 0.0;
  ResetMode reset_mode = ResetMode::kSubtractSpike;

  // Throws invalid-config / non-positive-threshold.
  void Validate() const;

  double reset_magnitude() const {
    return reset_mode == ResetMode::kSubtractThreshold ? threshold : 1.0;
  }

  bool operator==(const NeuronConfig&) const = default;
};

struct DecayConstants {
  double alpha;
  double beta;
};

DecayConstants decay_constants(const NeuronConfig& cfg);

// Returns cfg with only the firing threshold replaced.
NeuronConfig set_threshold(const NeuronConfig& cfg, double phi);

struct LayerState {
  std::vector<double> u;
  std::vector<double> i;
  std::vector<double> s;

  LayerState() = default;
  explicit LayerState(std::size_t n) : u(n, 0.0), i(n, 0.0), s(n, 0.0) {}

  std::size_t size() const { return u.size(); }
  // Throws length-mismatch if u, i, s differ in length.
  void CheckShape() const;
};

// I[n+1]; state is not modified.
std::vector<double> step_current(const LayerState& state, const NeuronConfig& cfg,
                                 std::span<const double> ff_drive,
                                 std::span<const double> rec_drive);

struct MembraneUpdate {
  std::vector<double> u;
  std::vector<double> s;
};

// (U[n+1], S[n+1]) from the current state. U[n+1] depends on I[n], not on
// I[n+1]; see the recursion at the top of this file.
MembraneUpdate step_membrane(const LayerState& state, const NeuronConfig& cfg);

// Full single step: returns the state at n+1.
LayerState advance(const LayerState& state, const NeuronConfig& cfg,
                   std::span<const double> ff_drive,
                   std::span<const double> rec_drive);

// Heaviside with spike at equality.
inline double Heaviside(double u, double phi) { return u >= phi ? 1.0 : 0.0; }

}  // namespace mtsnn

#endif  // MTSNN_LIF_HPP_
