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
#include "mtsnn/lif.hpp"

#include <cmath>
#include <string>

#include "mtsnn/error.hpp"

namespace mtsnn {

void NeuronConfig::Validate() const {
  MTSNN_CHECK(dt > 0.0 && tau_mem > 0.0 && tau_syn > 0.0, "invalid-config",
              "dt, tau_mem and tau_syn must be positive (dt=" + std::to_string(dt) +
                  ", tau_mem=" + std::to_string(tau_mem) +
                  ", tau_syn=" + std::to_string(tau_syn) + ")");
  MTSNN_CHECK(threshold > 0.0, "non-positive-threshold",
              "threshold must be positive, got " + std::to_string(threshold));
  MTSNN_CHECK(std::isfinite(i_ext), "invalid-config", "i_ext must be finite");
}

DecayConstants decay_constants(const NeuronConfig& cfg) {
  MTSNN_CHECK(cfg.dt > 0.0 && cfg.tau_mem > 0.0 && cfg.tau_syn > 0.0,
              "invalid-config", "dt, tau_mem and tau_syn must be positive");
  return {std::exp(-cfg.dt / cfg.tau_mem), std::exp(-cfg.dt / cfg.tau_syn)};
}

NeuronConfig set_threshold(const NeuronConfig& cfg, double phi) {
  MTSNN_CHECK(phi > 0.0, "non-positive-threshold",
              "threshold must be positive, got " + std::to_string(phi));
  NeuronConfig out = cfg;
  out.threshold = phi;
  return out;
}

void LayerState::CheckShape() const {
  MTSNN_CHECK(u.size() == i.size() && u.size() == s.size(), "length-mismatch",
              "layer state vectors differ in length");
}

std::vector<double> step_current(const LayerState& state, const NeuronConfig& cfg,
                                 std::span<const double> ff_drive,
                                 std::span<const double> rec_drive) {
  state.CheckShape();
  const std::size_t n = state.size();
  MTSNN_CHECK(ff_drive.size() == n && rec_drive.size() == n, "length-mismatch",
              "drive length does not match layer size");
  const double beta = decay_constants(cfg).beta;
  std::vector<double> next(n);
  for (std::size_t k = 0; k < n; ++k) {
    next[k] = beta * state.i[k] + ff_drive[k] + rec_drive[k] + cfg.i_ext;
  }
  return next;
}

MembraneUpdate step_membrane(const LayerState& state, const NeuronConfig& cfg) {
  state.CheckShape();
  const double alpha = decay_constants(cfg).alpha;
  const double r = cfg.reset_magnitude();
  const std::size_t n = state.size();
  MembraneUpdate out{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.u[k] = alpha * state.u[k] + state.i[k] - r * state.s[k];
    out.s[k] = Heaviside(out.u[k], cfg.threshold);
  }
  return out;
}

LayerState advance(const LayerState& state, const NeuronConfig& cfg,
                   std::span<const double> ff_drive,
                   std::span<const double> rec_drive) {
  LayerState next;
  next.i = step_current(state, cfg, ff_drive, rec_drive);
  MembraneUpdate m = step_membrane(state, cfg);
  next.u = std::move(m.u);
  next.s = std::move(m.s);
  return next;
}

}  // namespace mtsnn
