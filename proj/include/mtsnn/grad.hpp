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

// Backpropagation through time for the LIF recursion.
//
// With adjoints u'(t), i'(t), s'(t) of U, I, S at state index t+1, walking t
// from T-1 down to 0 (all adjoints at t = T are zero):
//
//   s'(t) = dL/dy(t) - r u'(t+1) + V^T i'(t+1)
//   u'(t) = sg(U(t+1) - phi) s'(t) + alpha u'(t+1)
//   i'(t) = u'(t+1) + beta i'(t+1)
//   dW   += i'(t) x(t)^T,   dV += i'(t) S(t)^T,   dL/dx(t) = W^T i'(t)
//
// where sg is the surrogate derivative. The reset term (-r u') can be
// detached.

#ifndef MTSNN_GRAD_HPP_
#define MTSNN_GRAD_HPP_

#include <cstdint>
#include <vector>

#include "mtsnn/graph.hpp"
#include "mtsnn/matrix.hpp"
#include "mtsnn/surrogate.hpp"

namespace mtsnn {

struct LayerGrad {
  Matrix weights;
  Matrix recurrent;  // empty when the layer has no V
  // dL/dU[0] and dL/dI[0]; zero-initialized state makes these diagnostic only.
  std::vector<double> initial_u;
  std::vector<double> initial_i;
};

struct GradientSet {
  std::vector<LayerGrad> feature;
  std::vector<LayerGrad> label;
  std::vector<LayerGrad> task;

  // All-zero gradients shaped like `net`.
  static GradientSet ZerosLike(const Network& net);

  std::vector<LayerGrad>& block(Block b);
  const std::vector<LayerGrad>& block(Block b) const;

  void SetZero();
  // this += other, entry by entry.
  void Add(const GradientSet& other);
  void Scale(double k);
  bool AllFinite() const;
  bool operator==(const GradientSet& other) const;
};

// dL/dy for the two heads. Rows are time steps. `task` may be empty when the
// task block was not run.
struct OutputGrads {
  Matrix label;
  Matrix task;
};

struct BackwardOptions {
  SurrogateSpec surrogate;
  bool detach_reset = false;
};

GradientSet backward(const ForwardTrace& trace, const Network& net,
                     const SpikeTrain& input, const OutputGrads& loss_grads,
                     const BackwardOptions& options);

// Same as backward() but accumulates into `grads` (which must already be
// shaped like `net`); avoids reallocating per sample.
void BackwardInto(const ForwardTrace& trace, const Network& net,
                  const SpikeTrain& input, const OutputGrads& loss_grads,
                  const BackwardOptions& options, GradientSet& grads);

enum class OptimizerKind { kAdam, kSgd };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void Validate() const;
};

// First and second moments mirror the GradientSet layout.
struct OptimizerState {
  std::uint64_t step = 0;
  GradientSet m;
  GradientSet v;
};

OptimizerState MakeOptimizerState(const Network& net);

// Applies one update in place. Throws non-finite-gradient / shape-mismatch.
void optimizer_step(Network& net, const GradientSet& grads, OptimizerState& state,
                    const OptimizerConfig& config);

}  // namespace mtsnn

#endif  // MTSNN_GRAD_HPP_
