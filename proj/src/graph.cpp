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
#include "mtsnn/graph.hpp"

#include <cmath>
#include <string>

#include "mtsnn/error.hpp"
#include "mtsnn/random.hpp"

namespace mtsnn {
namespace {

constexpr const char* kTopology = "inconsistent-topology";

std::string Describe(const char* block, std::size_t index) {
  return std::string(block) + " layer " + std::to_string(index);
}

void CheckChain(const std::vector<LayerSpec>& layers, std::size_t in_size,
                const char* name) {
  std::size_t expected = in_size;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    MTSNN_CHECK(layers[k].in_size == expected, kTopology,
                Describe(name, k) + " expects " + std::to_string(layers[k].in_size) +
                    " inputs but receives " + std::to_string(expected));
    expected = layers[k].out_size;
  }
}

LayerSpec MakeLayer(std::size_t in, std::size_t out, const Architecture& arch,
                    Rng& rng) {
  LayerSpec layer;
  layer.in_size = in;
  layer.out_size = out;
  layer.neuron = arch.neuron;
  layer.weights = Matrix(out, in);
  const double k = arch.init_gain / std::sqrt(static_cast<double>(in));
  for (double& w : layer.weights.data()) w = rng.Uniform(-k, k);
  if (arch.recurrent) {
    Matrix v(out, out);
    const double kr = arch.init_gain / std::sqrt(static_cast<double>(out));
    for (double& w : v.data()) w = rng.Uniform(-kr, kr);
    layer.recurrent = std::move(v);
  }
  return layer;
}

NeuronConfig Controlled(NeuronConfig cfg, const ForwardOptions& options) {
  if (options.threshold) cfg = set_threshold(cfg, *options.threshold);
  if (options.i_ext) cfg.i_ext = *options.i_ext;
  return cfg;
}

void RunBlock(const std::vector<LayerSpec>& layers, const SpikeTrain& input,
              const ForwardOptions& options, bool controlled,
              std::vector<LayerTrace>& out) {
  out.reserve(layers.size());
  const SpikeTrain* x = &input;
  for (const LayerSpec& layer : layers) {
    const NeuronConfig cfg = controlled ? Controlled(layer.neuron, options) : layer.neuron;
    out.push_back(RunLayer(layer, cfg, *x, options.mode, options.relaxation));
    x = &out.back().output;
  }
}

}  // namespace

void LayerSpec::Validate() const {
  MTSNN_CHECK(in_size > 0 && out_size > 0, kTopology, "layer sizes must be positive");
  MTSNN_CHECK(weights.rows() == out_size && weights.cols() == in_size, kTopology,
              "weight matrix is " + std::to_string(weights.rows()) + "x" +
                  std::to_string(weights.cols()) + ", expected " +
                  std::to_string(out_size) + "x" + std::to_string(in_size));
  if (recurrent) {
    MTSNN_CHECK(recurrent->rows() == out_size && recurrent->cols() == out_size,
                kTopology, "recurrent matrix must be square of side out_size");
  }
  neuron.Validate();
}

std::size_t NetworkSpec::input_size() const {
  if (!feature_block.empty()) return feature_block.front().in_size;
  if (!label_block.empty()) return label_block.front().in_size;
  return 0;
}

std::size_t NetworkSpec::feature_size() const {
  return feature_block.empty() ? input_size() : feature_block.back().out_size;
}

const std::vector<LayerSpec>& NetworkSpec::block(Block b) const {
  switch (b) {
    case Block::kFeature: return feature_block;
    case Block::kLabel: return label_block;
    case Block::kTask:
    default: return task_block;
  }
}

std::vector<LayerSpec>& NetworkSpec::block(Block b) {
  return const_cast<std::vector<LayerSpec>&>(std::as_const(*this).block(b));
}

void NetworkSpec::Validate() const {
  MTSNN_CHECK(!label_block.empty(), kTopology, "label block needs at least one layer");
  MTSNN_CHECK(num_labels_task1 + num_labels_task2 > 0, kTopology,
              "at least one label is required");
  for (const auto* blk : {&feature_block, &label_block, &task_block}) {
    for (const LayerSpec& layer : *blk) layer.Validate();
  }
  CheckChain(feature_block, input_size(), "feature");
  CheckChain(label_block, feature_size(), "label");
  CheckChain(task_block, feature_size(), "task");
  MTSNN_CHECK(label_block.back().out_size == num_labels_task1 + num_labels_task2,
              kTopology,
              "label block ends in " + std::to_string(label_block.back().out_size) +
                  " units but tasks need " + std::to_string(num_labels_task1) + "+" +
                  std::to_string(num_labels_task2));
  if (!task_block.empty()) {
    MTSNN_CHECK(task_block.back().out_size == 2, kTopology,
                "task block must end in one unit per task (2)");
  }
}

Network build_mtsnn(const Architecture& arch, std::uint64_t seed) {
  MTSNN_CHECK(arch.input_size > 0, kTopology, "input size must be positive");
  MTSNN_CHECK(arch.init_gain > 0.0, "invalid-config", "init_gain must be positive");
  arch.neuron.Validate();
  Rng rng(DeriveSeed(seed, 0x1417));
  Network net;
  net.seed = seed;
  NetworkSpec& spec = net.spec;
  spec.num_labels_task1 = arch.num_labels_task1;
  spec.num_labels_task2 = arch.num_labels_task2;

  std::size_t width = arch.input_size;
  for (std::size_t out : arch.feature_sizes) {
    spec.feature_block.push_back(MakeLayer(width, out, arch, rng));
    width = out;
  }
  const std::size_t features = width;
  for (std::size_t out : arch.label_hidden) {
    spec.label_block.push_back(MakeLayer(width, out, arch, rng));
    width = out;
  }
  spec.label_block.push_back(
      MakeLayer(width, arch.num_labels_task1 + arch.num_labels_task2, arch, rng));
  if (arch.num_tasks > 0) {
    width = features;
    for (std::size_t out : arch.task_hidden) {
      spec.task_block.push_back(MakeLayer(width, out, arch, rng));
      width = out;
    }
    spec.task_block.push_back(MakeLayer(width, arch.num_tasks, arch, rng));
  }
  spec.Validate();
  return net;
}

LayerTrace RunLayer(const LayerSpec& layer, const NeuronConfig& neuron,
                    const SpikeTrain& input, SpikeMode mode,
                    const SurrogateSpec& relaxation) {
  MTSNN_CHECK(input.width() == layer.in_size, "dimension-mismatch",
              "layer expects " + std::to_string(layer.in_size) + " inputs, got " +
                  std::to_string(input.width()));
  const std::size_t steps = input.steps();
  const std::size_t n = layer.out_size;
  const auto [alpha, beta] = decay_constants(neuron);
  const double r = neuron.reset_magnitude();
  const double phi = neuron.threshold;
  const Matrix* v = layer.recurrent ? &*layer.recurrent : nullptr;

  LayerTrace tr;
  tr.neuron = neuron;
  tr.i = Matrix(steps, n);
  tr.u = Matrix(steps, n);
  tr.s = Matrix(steps, n);
  tr.output = SpikeTrain(n);

  std::vector<double> u(n, 0.0), cur(n, 0.0), s(n, 0.0);
  std::vector<std::uint32_t> active;  // nonzero entries of s
  active.reserve(n);
  for (std::size_t t = 0; t < steps; ++t) {
    const auto idx = input.indices(t);
    const auto val = input.values(t);
    auto u_row = tr.u.row(t);
    auto i_row = tr.i.row(t);
    auto s_row = tr.s.row(t);
    for (std::size_t k = 0; k < n; ++k) {
      u_row[k] = alpha * u[k] + cur[k] - r * s[k];

      const auto w = layer.weights.row(k);
      double ff = 0.0;
      for (std::size_t e = 0; e < idx.size(); ++e) ff += w[idx[e]] * val[e];
      double rec = 0.0;
      if (v != nullptr) {
        const auto vr = v->row(k);
        for (std::uint32_t j : active) rec += vr[j] * s[j];
      }
      i_row[k] = beta * cur[k] + ff + rec + neuron.i_ext;
      s_row[k] = mode == SpikeMode::kBinary ? Heaviside(u_row[k], phi)
                                            : relaxed_spike(u_row[k], phi, relaxation);
    }
    active.clear();
    for (std::size_t k = 0; k < n; ++k) {
      u[k] = u_row[k];
      cur[k] = i_row[k];
      s[k] = s_row[k];
      if (s[k] != 0.0) {
        tr.output.Push(static_cast<std::uint32_t>(k), s[k]);
        active.push_back(static_cast<std::uint32_t>(k));
      }
    }
    tr.output.EndStep();
  }
  return tr;
}

const std::vector<LayerTrace>& ForwardTrace::block(Block b) const {
  switch (b) {
    case Block::kFeature: return feature;
    case Block::kLabel: return label;
    case Block::kTask:
    default: return task;
  }
}

const SpikeTrain& ForwardTrace::features(const SpikeTrain& input) const {
  return feature.empty() ? input : feature.back().output;
}

ForwardTrace Forward(const Network& net, const SpikeTrain& input,
                     const ForwardOptions& options) {
  const NetworkSpec& spec = net.spec;
  MTSNN_CHECK(input.width() == spec.input_size(), "dimension-mismatch",
              "input has " + std::to_string(input.width()) +
                  " channels, network expects " + std::to_string(spec.input_size()));
  MTSNN_CHECK(input.steps() >= 1, "dimension-mismatch", "input needs at least one step");
  MTSNN_CHECK(!options.use_task_block || !spec.task_block.empty(), "invalid-config",
              "task block requested but the network has none");
  if (options.mode == SpikeMode::kRelaxed) options.relaxation.Validate();

  ForwardTrace tr;
  tr.steps = input.steps();
  tr.mode = options.mode;
  tr.task_block_used = options.use_task_block;
  RunBlock(spec.feature_block, input, options, true, tr.feature);
  const SpikeTrain& features = tr.features(input);
  RunBlock(spec.label_block, features, options, true, tr.label);
  if (options.use_task_block) {
    RunBlock(spec.task_block, features, options, false, tr.task);
  }
  return tr;
}

ForwardTrace forward(const Network& net, const SpikeTrain& input, double phi,
                     bool use_task_block) {
  ForwardOptions options;
  options.threshold = phi;
  options.use_task_block = use_task_block;
  return Forward(net, input, options);
}

ForwardTrace forward_with_ext_current(const Network& net, const SpikeTrain& input,
                                      double i_ext, bool use_task_block) {
  ForwardOptions options;
  options.i_ext = i_ext;
  options.use_task_block = use_task_block;
  return Forward(net, input, options);
}

}  // namespace mtsnn
