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

#include <random>

#include "doctest.h"
#include "mtsnn/graph.hpp"
#include "oracles.hpp"

using namespace mtsnn;
using mtsnn::testing::ErrorCodeOf;

namespace {

Architecture SmallArch() {
  Architecture a;
  a.input_size = 20;
  a.feature_sizes = {16, 12};
  a.label_hidden = {8};
  a.task_hidden = {6};
  a.init_gain = 3.0;
  return a;
}

double Rate(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += v;
  return s / static_cast<double>(m.data().size());
}

}  // namespace

TEST_CASE("default architecture shapes and reproducible weights") {
  Architecture arch;  // 2312 inputs, 512,512 features, 128+12 labels, 128+2 task
  const Network a = build_mtsnn(arch, 7);
  const Network b = build_mtsnn(arch, 7);
  CHECK(a == b);
  CHECK(a.spec.input_size() == 2312);
  CHECK(a.spec.feature_size() == 512);
  CHECK(a.spec.label_block.back().out_size == 12);
  CHECK(a.spec.task_block.back().out_size == 2);
  CHECK(a.spec.num_tasks() == 2);
  CHECK_FALSE(a.spec.feature_block[0].recurrent.has_value());
  const Network c = build_mtsnn(arch, 8);
  CHECK_FALSE(a == c);
}

TEST_CASE("weights are bounded by gain over root fan-in") {
  Architecture arch = SmallArch();
  const Network net = build_mtsnn(arch, 1);
  for (Block b : {Block::kFeature, Block::kLabel, Block::kTask}) {
    for (const LayerSpec& l : net.spec.block(b)) {
      const double k = arch.init_gain / std::sqrt(static_cast<double>(l.in_size));
      double lo = 0.0, hi = 0.0;
      for (double w : l.weights.data()) {
        REQUIRE(std::fabs(w) <= k);
        lo = std::min(lo, w);
        hi = std::max(hi, w);
      }
      CHECK(lo < -0.5 * k);
      CHECK(hi > 0.5 * k);
    }
  }
}

TEST_CASE("task block does not perturb the feature and label weights") {
  Architecture with = SmallArch();
  Architecture without = SmallArch();
  without.num_tasks = 0;
  const Network a = build_mtsnn(with, 3);
  const Network b = build_mtsnn(without, 3);
  CHECK(a.spec.feature_block == b.spec.feature_block);
  CHECK(a.spec.label_block == b.spec.label_block);
  CHECK(b.spec.task_block.empty());
}

TEST_CASE("topology validation") {
  Network net = build_mtsnn(SmallArch(), 1);
  net.spec.label_block.back().out_size = 11;
  net.spec.label_block.back().weights = Matrix(11, 8);
  CHECK(ErrorCodeOf([&] { net.spec.Validate(); }) == "inconsistent-topology");

  Architecture direct = SmallArch();
  direct.feature_sizes = {};
  direct.label_hidden = {};
  const Network single = build_mtsnn(direct, 1);
  CHECK(single.spec.label_block.size() == 1);
  CHECK(single.spec.label_block[0].in_size == 20);
  CHECK(single.spec.label_block[0].out_size == 12);
}

TEST_CASE("quiescence and determinism") {
  const Network net = build_mtsnn(SmallArch(), 2);
  SpikeTrain silent(20);
  for (int t = 0; t < 30; ++t) silent.EndStep();
  const ForwardTrace q = forward(net, silent, 1.25, true);
  for (const auto* blk : {&q.feature, &q.label, &q.task}) {
    for (const LayerTrace& l : *blk) CHECK(l.output.nnz() == 0);
  }

  std::mt19937_64 gen(4);
  const SpikeTrain in = testing::RandomBinaryInput(gen, 20, 40, 0.3);
  const ForwardTrace a = forward(net, in, 1.25, true);
  const ForwardTrace b = forward(net, in, 1.25, true);
  CHECK(a.label_output() == b.label_output());
  CHECK(a.task_output() == b.task_output());
  CHECK(Rate(a.feature[0].s) > 0.0);
}

TEST_CASE("dimension and configuration errors") {
  const Network net = build_mtsnn(SmallArch(), 2);
  SpikeTrain wrong(19);
  wrong.EndStep();
  CHECK(ErrorCodeOf([&] { forward(net, wrong, 1.25, false); }) == "dimension-mismatch");
  Architecture no_task = SmallArch();
  no_task.num_tasks = 0;
  const Network headless = build_mtsnn(no_task, 2);
  SpikeTrain ok(20);
  ok.EndStep();
  CHECK(ErrorCodeOf([&] { forward(headless, ok, 1.25, true); }) == "invalid-config");
}

TEST_CASE("two-layer chain matches the scalar reference") {
  // 1 input -> 1 unit -> 1 unit, hand-chosen weights, T = 5.
  Architecture arch;
  arch.input_size = 1;
  arch.feature_sizes = {1};
  arch.label_hidden = {};
  arch.num_labels_task1 = 1;
  arch.num_labels_task2 = 0;
  arch.num_tasks = 0;
  Network net = build_mtsnn(arch, 0);
  net.spec.feature_block[0].weights(0, 0) = 2.0;
  net.spec.label_block[0].weights(0, 0) = 1.5;
  const std::vector<double> x = {1, 1, 0, 1, 1};
  const SpikeTrain in = SpikeTrain::FromDense(x, 1, 5);
  const ForwardTrace tr = forward(net, in, 1.25, false);

  testing::ScalarNeuron first;
  first.w = 2.0;
  const auto h = testing::SimulateScalar(first, x);
  testing::ScalarNeuron second;
  second.w = 1.5;
  const auto y = testing::SimulateScalar(second, h.s);
  for (std::size_t t = 0; t < 5; ++t) {
    CHECK(tr.feature[0].s(t, 0) == h.s[t]);
    CHECK(tr.label[0].u(t, 0) == y.u[t]);
    CHECK(tr.label[0].s(t, 0) == y.s[t]);
  }
  // Hand check of the first layer: I = 2, 2+2b, ...; U[2] = 2 >= 1.25.
  CHECK(h.s[0] == 0.0);
  CHECK(h.s[1] == 1.0);
}

TEST_CASE("task block is a pure sink") {
  const Network net = build_mtsnn(SmallArch(), 5);
  std::mt19937_64 gen(6);
  const SpikeTrain in = testing::RandomBinaryInput(gen, 20, 50, 0.3);
  const ForwardTrace with = forward(net, in, 3.0, true);
  const ForwardTrace without = forward(net, in, 3.0, false);
  CHECK(without.task.empty());
  CHECK_FALSE(with.task.empty());
  CHECK(with.label_output() == without.label_output());
  for (std::size_t l = 0; l < with.feature.size(); ++l) {
    CHECK(with.feature[l].u == without.feature[l].u);
  }
}

TEST_CASE("threshold override is scoped to feature and label blocks") {
  const Network net = build_mtsnn(SmallArch(), 5);
  const Network before = net;
  std::mt19937_64 gen(7);
  const SpikeTrain in = testing::RandomBinaryInput(gen, 20, 30, 0.3);
  const ForwardTrace tr = forward(net, in, 5.0, true);
  CHECK(net == before);
  for (const LayerTrace& l : tr.feature) CHECK(l.neuron.threshold == 5.0);
  for (const LayerTrace& l : tr.label) CHECK(l.neuron.threshold == 5.0);
  for (const LayerTrace& l : tr.task) CHECK(l.neuron.threshold == 1.25);
  for (const LayerSpec& l : net.spec.task_block) CHECK(l.neuron.threshold == 1.25);
}

TEST_CASE("blockwise composition equals the full forward") {
  const Network net = build_mtsnn(SmallArch(), 8);
  std::mt19937_64 gen(8);
  const SpikeTrain in = testing::RandomBinaryInput(gen, 20, 40, 0.3);
  const ForwardTrace full = forward(net, in, 1.25, true);

  SpikeTrain x = in;
  for (const LayerSpec& l : net.spec.feature_block) {
    x = RunLayer(l, l.neuron, x, SpikeMode::kBinary, {}).output;
  }
  SpikeTrain y = x;
  for (const LayerSpec& l : net.spec.label_block) {
    y = RunLayer(l, l.neuron, y, SpikeMode::kBinary, {}).output;
  }
  SpikeTrain z = x;
  for (const LayerSpec& l : net.spec.task_block) {
    z = RunLayer(l, l.neuron, z, SpikeMode::kBinary, {}).output;
  }
  CHECK(y == full.label.back().output);
  CHECK(z == full.task.back().output);
}

TEST_CASE("permuting hidden units leaves outputs unchanged") {
  const Network net = build_mtsnn(SmallArch(), 9);
  std::mt19937_64 gen(9);
  const SpikeTrain in = testing::RandomBinaryInput(gen, 20, 40, 0.3);
  const ForwardTrace ref = forward(net, in, 1.25, true);

  // Reverse the units of the first feature layer.
  Network p = net;
  LayerSpec& h = p.spec.feature_block[0];
  LayerSpec& next = p.spec.feature_block[1];
  const std::size_t n = h.out_size;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t c = 0; c < h.in_size; ++c) {
      h.weights(k, c) = net.spec.feature_block[0].weights(n - 1 - k, c);
    }
    for (std::size_t r = 0; r < next.out_size; ++r) {
      next.weights(r, k) = net.spec.feature_block[1].weights(r, n - 1 - k);
    }
  }
  const ForwardTrace perm = forward(p, in, 1.25, true);
  CHECK(perm.label_output() == ref.label_output());
  CHECK(perm.task_output() == ref.task_output());
}

TEST_CASE("external current control") {
  const Network net = build_mtsnn(SmallArch(), 10);
  std::mt19937_64 gen(10);
  const SpikeTrain in = testing::RandomBinaryInput(gen, 20, 60, 0.2);
  const ForwardTrace base = forward(net, in, 1.25, true);
  const ForwardTrace zero = forward_with_ext_current(net, in, 0.0, true);
  CHECK(zero.label_output() == base.label_output());
  CHECK(zero.task_output() == base.task_output());

  const ForwardTrace low = forward_with_ext_current(net, in, 0.05, false);
  const ForwardTrace high = forward_with_ext_current(net, in, 5.0, false);
  for (std::size_t l = 0; l < high.feature.size(); ++l) {
    CHECK(Rate(high.feature[l].s) > Rate(low.feature[l].s));
  }
  CHECK(Rate(high.label_output()) > Rate(low.label_output()));
  CHECK(high.feature[0].neuron.threshold == 1.25);
}
