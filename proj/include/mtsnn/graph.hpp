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

// Three-block multi-task network:
//
//   input -> feature block -> label block   (task-1 and task-2 outputs)
//                          \-> task block   (which task is active)
//
// Every layer is a dense LIF layer. A layer turns its input sequence x[0..T)
// into the output sequence y[n] = S[n+1], so each layer adds one step of
// latency and blocks compose by feeding one layer's output to the next.

#ifndef MTSNN_GRAPH_HPP_
#define MTSNN_GRAPH_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "mtsnn/lif.hpp"
#include "mtsnn/matrix.hpp"
#include "mtsnn/spike_train.hpp"
#include "mtsnn/surrogate.hpp"

namespace mtsnn {

struct LayerSpec {
  std::size_t in_size = 0;
  std::size_t out_size = 0;
  Matrix weights;                   // out_size x in_size
  std::optional<Matrix> recurrent;  // out_size x out_size
  NeuronConfig neuron;

  void Validate() const;
  bool operator==(const LayerSpec&) const = default;
};

enum class Block { kFeature = 0, kLabel = 1, kTask = 2 };

struct NetworkSpec {
  std::vector<LayerSpec> feature_block;
  std::vector<LayerSpec> label_block;
  std::vector<LayerSpec> task_block;  // may be empty (no task head)
  std::size_t num_labels_task1 = 10;
  std::size_t num_labels_task2 = 2;

  std::size_t input_size() const;
  std::size_t feature_size() const;  // width of the feature block output
  std::size_t num_tasks() const { return task_block.empty() ? 0 : task_block.back().out_size; }
  const std::vector<LayerSpec>& block(Block b) const;
  std::vector<LayerSpec>& block(Block b);

  // Throws inconsistent-topology.
  void Validate() const;
  bool operator==(const NetworkSpec&) const = default;
};

// Topology plus the initialization recipe, before weights exist.
struct Architecture {
  std::size_t input_size = 2 * 34 * 34;
  std::vector<std::size_t> feature_sizes = {512, 512};
  std::vector<std::size_t> label_hidden = {128};
  std::vector<std::size_t> task_hidden = {128};
  std::size_t num_labels_task1 = 10;
  std::size_t num_labels_task2 = 2;
  std::size_t num_tasks = 2;  // 0 disables the task block
  bool recurrent = false;
  NeuronConfig neuron;        // threshold here is the base (task-1) value
  double init_gain = 1.25;    // weights ~ U[-k, k], k = gain / sqrt(fan_in)
};

// Weights plus the seed they were drawn from.
struct Network {
  NetworkSpec spec;
  std::uint64_t seed = 0;

  bool operator==(const Network&) const = default;
};

Network build_mtsnn(const Architecture& arch, std::uint64_t seed);

enum class SpikeMode {
  kBinary,   // Heaviside, the real network
  kRelaxed,  // smooth spikes, only for gradient checks
};

struct ForwardOptions {
  // Applied to feature and label blocks only; the task block always keeps
  // its stored configuration.
  std::optional<double> threshold;
  std::optional<double> i_ext;
  bool use_task_block = false;
  SpikeMode mode = SpikeMode::kBinary;
  SurrogateSpec relaxation;  // used iff mode == kRelaxed
};

// Rows are time steps. Row t holds (I, U, S) at state index t + 1.
struct LayerTrace {
  Matrix i;
  Matrix u;
  Matrix s;
  SpikeTrain output;  // same spikes as `s`, sparse, fed to the next layer
  NeuronConfig neuron;  // the effective configuration used for this run
};

struct ForwardTrace {
  std::size_t steps = 0;
  SpikeMode mode = SpikeMode::kBinary;
  bool task_block_used = false;
  std::vector<LayerTrace> feature;
  std::vector<LayerTrace> label;
  std::vector<LayerTrace> task;

  const std::vector<LayerTrace>& block(Block b) const;
  // Output of the feature block, i.e. the input of both classifier heads.
  const SpikeTrain& features(const SpikeTrain& input) const;
  const Matrix& label_output() const { return label.back().s; }
  const Matrix& task_output() const { return task.back().s; }
};

// Runs a single layer over the whole input sequence.
LayerTrace RunLayer(const LayerSpec& layer, const NeuronConfig& neuron,
                    const SpikeTrain& input, SpikeMode mode,
                    const SurrogateSpec& relaxation);

ForwardTrace Forward(const Network& net, const SpikeTrain& input,
                     const ForwardOptions& options);

// Threshold-controlled forward: feature and label blocks run at `phi`.
ForwardTrace forward(const Network& net, const SpikeTrain& input, double phi,
                     bool use_task_block);

// External-current-controlled forward: thresholds stay at their stored
// values, feature and label blocks receive `i_ext` every step.
ForwardTrace forward_with_ext_current(const Network& net, const SpikeTrain& input,
                                      double i_ext, bool use_task_block);

}  // namespace mtsnn

#endif  // MTSNN_GRAPH_HPP_
