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
#include "mtsnn/grad.hpp"

#include <cmath>
#include <string>

#include "mtsnn/error.hpp"

namespace mtsnn {
namespace {

LayerGrad ZerosFor(const LayerSpec& layer) {
  LayerGrad g;
  g.weights = Matrix(layer.out_size, layer.in_size);
  if (layer.recurrent) g.recurrent = Matrix(layer.out_size, layer.out_size);
  g.initial_u.assign(layer.out_size, 0.0);
  g.initial_i.assign(layer.out_size, 0.0);
  return g;
}

template <typename Fn>
void ForEachMatrix(GradientSet& g, Fn&& fn) {
  for (auto* blk : {&g.feature, &g.label, &g.task}) {
    for (LayerGrad& lg : *blk) {
      fn(lg.weights);
      fn(lg.recurrent);
    }
  }
}

void CheckSameShape(const std::vector<LayerGrad>& g, const std::vector<LayerSpec>& layers,
                    const char* what) {
  MTSNN_CHECK(g.size() == layers.size(), "shape-mismatch",
              std::string(what) + " block layer count differs from the network");
  for (std::size_t k = 0; k < g.size(); ++k) {
    MTSNN_CHECK(g[k].weights.rows() == layers[k].out_size &&
                    g[k].weights.cols() == layers[k].in_size,
                "shape-mismatch", std::string(what) + " gradient shape differs");
    MTSNN_CHECK(g[k].recurrent.empty() == !layers[k].recurrent.has_value(),
                "shape-mismatch", std::string(what) + " recurrent gradient mismatch");
  }
}

void CheckShapes(const GradientSet& g, const Network& net) {
  CheckSameShape(g.feature, net.spec.feature_block, "feature");
  CheckSameShape(g.label, net.spec.label_block, "label");
  CheckSameShape(g.task, net.spec.task_block, "task");
}

void CheckTraceShapes(const std::vector<LayerTrace>& traces,
                      const std::vector<LayerSpec>& layers, std::size_t steps,
                      const char* what) {
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const LayerTrace& tr = traces[k];
    const bool ok = tr.u.rows() == steps && tr.u.cols() == layers[k].out_size &&
                    tr.i.rows() == steps && tr.i.cols() == layers[k].out_size &&
                    tr.s.rows() == steps && tr.s.cols() == layers[k].out_size &&
                    tr.output.steps() == steps && tr.output.width() == layers[k].out_size;
    MTSNN_CHECK(ok, "trace-mismatch",
                std::string(what) + " layer " + std::to_string(k) +
                    " trace does not match the network");
  }
}

// Accumulates this layer's weight gradients into g and, when in_adj is
// given, adds dL/dx into it.
void BackwardLayer(const LayerSpec& layer, const LayerTrace& tr, const SpikeTrain& x,
                   const Matrix& out_adj, const BackwardOptions& options,
                   LayerGrad& g, Matrix* in_adj) {
  const std::size_t steps = tr.u.rows();
  const std::size_t n = layer.out_size;
  const auto [alpha, beta] = decay_constants(tr.neuron);
  const double r = options.detach_reset ? 0.0 : tr.neuron.reset_magnitude();
  const double phi = tr.neuron.threshold;
  const Matrix* v = layer.recurrent ? &*layer.recurrent : nullptr;

  std::vector<double> u_next(n, 0.0), i_next(n, 0.0);
  std::vector<double> s_adj(n), u_adj(n), i_adj(n);
  for (std::size_t t = steps; t-- > 0;) {
    const auto dy = out_adj.row(t);
    for (std::size_t k = 0; k < n; ++k) s_adj[k] = dy[k] - r * u_next[k];
    if (v != nullptr) {
      for (std::size_t j = 0; j < n; ++j) {
        const double ij = i_next[j];
        if (ij == 0.0) continue;
        const auto vr = v->row(j);
        for (std::size_t k = 0; k < n; ++k) s_adj[k] += vr[k] * ij;
      }
    }
    const auto u_row = tr.u.row(t);
    for (std::size_t k = 0; k < n; ++k) {
      u_adj[k] = surrogate_derivative(u_row[k], phi, options.surrogate) * s_adj[k] +
                 alpha * u_next[k];
      i_adj[k] = u_next[k] + beta * i_next[k];
    }

    const auto idx = x.indices(t);
    const auto val = x.values(t);
    for (std::size_t k = 0; k < n; ++k) {
      const double ik = i_adj[k];
      if (ik == 0.0) continue;
      auto gw = g.weights.row(k);
      for (std::size_t e = 0; e < idx.size(); ++e) gw[idx[e]] += ik * val[e];
    }
    if (v != nullptr && t > 0) {
      const auto s_prev = tr.s.row(t - 1);
      for (std::size_t k = 0; k < n; ++k) {
        const double ik = i_adj[k];
        if (ik == 0.0) continue;
        auto gv = g.recurrent.row(k);
        for (std::size_t j = 0; j < n; ++j) {
          if (s_prev[j] != 0.0) gv[j] += ik * s_prev[j];
        }
      }
    }
    if (in_adj != nullptr) {
      auto dx = in_adj->row(t);
      for (std::size_t k = 0; k < n; ++k) {
        const double ik = i_adj[k];
        if (ik == 0.0) continue;
        const auto w = layer.weights.row(k);
        for (std::size_t j = 0; j < dx.size(); ++j) dx[j] += w[j] * ik;
      }
    }
    u_next.swap(u_adj);
    i_next.swap(i_adj);
  }
  for (std::size_t k = 0; k < n; ++k) {
    g.initial_u[k] += alpha * u_next[k];
    g.initial_i[k] += u_next[k] + beta * i_next[k];
  }
}

// Runs a block backwards from dL/d(block output); adds dL/d(block input)
// into in_adj when given.
void BackwardBlock(const std::vector<LayerSpec>& layers,
                   const std::vector<LayerTrace>& traces, const SpikeTrain& input,
                   const Matrix& out_adj, const BackwardOptions& options,
                   std::vector<LayerGrad>& grads, Matrix* in_adj) {
  const std::size_t steps = out_adj.rows();
  Matrix adj = out_adj;
  for (std::size_t l = layers.size(); l-- > 0;) {
    const SpikeTrain& x = l == 0 ? input : traces[l - 1].output;
    if (l == 0) {
      BackwardLayer(layers[l], traces[l], x, adj, options, grads[l], in_adj);
    } else {
      Matrix prev(steps, layers[l].in_size);
      BackwardLayer(layers[l], traces[l], x, adj, options, grads[l], &prev);
      adj = std::move(prev);
    }
  }
}

}  // namespace

void SurrogateSpec::Validate() const {
  MTSNN_CHECK(scale > 0.0 && std::isfinite(scale), "invalid-config",
              "surrogate scale must be positive");
}

GradientSet GradientSet::ZerosLike(const Network& net) {
  GradientSet g;
  for (const auto& layer : net.spec.feature_block) g.feature.push_back(ZerosFor(layer));
  for (const auto& layer : net.spec.label_block) g.label.push_back(ZerosFor(layer));
  for (const auto& layer : net.spec.task_block) g.task.push_back(ZerosFor(layer));
  return g;
}

std::vector<LayerGrad>& GradientSet::block(Block b) {
  switch (b) {
    case Block::kFeature: return feature;
    case Block::kLabel: return label;
    case Block::kTask:
    default: return task;
  }
}

const std::vector<LayerGrad>& GradientSet::block(Block b) const {
  return const_cast<GradientSet*>(this)->block(b);
}

void GradientSet::SetZero() {
  ForEachMatrix(*this, [](Matrix& m) { m.Fill(0.0); });
  for (auto* blk : {&feature, &label, &task}) {
    for (LayerGrad& lg : *blk) {
      std::fill(lg.initial_u.begin(), lg.initial_u.end(), 0.0);
      std::fill(lg.initial_i.begin(), lg.initial_i.end(), 0.0);
    }
  }
}

void GradientSet::Add(const GradientSet& other) {
  auto add_block = [](std::vector<LayerGrad>& dst, const std::vector<LayerGrad>& src) {
    MTSNN_CHECK(dst.size() == src.size(), "shape-mismatch", "gradient layouts differ");
    for (std::size_t l = 0; l < dst.size(); ++l) {
      for (auto [d, s] : {std::pair{&dst[l].weights, &src[l].weights},
                          std::pair{&dst[l].recurrent, &src[l].recurrent}}) {
        MTSNN_CHECK(d->size() == s->size(), "shape-mismatch", "gradient shapes differ");
        auto dd = d->data();
        auto sd = s->data();
        for (std::size_t k = 0; k < dd.size(); ++k) dd[k] += sd[k];
      }
      for (std::size_t k = 0; k < dst[l].initial_u.size(); ++k) {
        dst[l].initial_u[k] += src[l].initial_u[k];
        dst[l].initial_i[k] += src[l].initial_i[k];
      }
    }
  };
  add_block(feature, other.feature);
  add_block(label, other.label);
  add_block(task, other.task);
}

void GradientSet::Scale(double k) {
  ForEachMatrix(*this, [k](Matrix& m) {
    for (double& x : m.data()) x *= k;
  });
}

bool GradientSet::AllFinite() const {
  bool ok = true;
  ForEachMatrix(const_cast<GradientSet&>(*this), [&ok](Matrix& m) {
    for (double x : m.data()) ok = ok && std::isfinite(x);
  });
  return ok;
}

bool GradientSet::operator==(const GradientSet& other) const {
  auto same = [](const std::vector<LayerGrad>& a, const std::vector<LayerGrad>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t l = 0; l < a.size(); ++l) {
      if (!(a[l].weights == b[l].weights) || !(a[l].recurrent == b[l].recurrent)) return false;
    }
    return true;
  };
  return same(feature, other.feature) && same(label, other.label) && same(task, other.task);
}

void BackwardInto(const ForwardTrace& trace, const Network& net,
                  const SpikeTrain& input, const OutputGrads& loss_grads,
                  const BackwardOptions& options, GradientSet& grads) {
  const NetworkSpec& spec = net.spec;
  options.surrogate.Validate();
  CheckShapes(grads, net);
  MTSNN_CHECK(trace.feature.size() == spec.feature_block.size() &&
                  trace.label.size() == spec.label_block.size(),
              "trace-mismatch", "trace was not produced by this network");
  MTSNN_CHECK(input.steps() == trace.steps && input.width() == spec.input_size(),
              "trace-mismatch", "input does not match the trace");
  const std::size_t steps = trace.steps;
  if (trace.task_block_used) {
    MTSNN_CHECK(trace.task.size() == spec.task_block.size(), "trace-mismatch",
                "task trace does not match the network");
  }
  CheckTraceShapes(trace.feature, spec.feature_block, steps, "feature");
  CheckTraceShapes(trace.label, spec.label_block, steps, "label");
  if (trace.task_block_used) CheckTraceShapes(trace.task, spec.task_block, steps, "task");
  MTSNN_CHECK(loss_grads.label.rows() == steps &&
                  loss_grads.label.cols() == spec.label_block.back().out_size,
              "shape-mismatch", "label loss gradient shape differs from label output");
  if (trace.task_block_used) {
    MTSNN_CHECK(loss_grads.task.rows() == steps &&
                    loss_grads.task.cols() == spec.task_block.back().out_size,
                "shape-mismatch", "task loss gradient shape differs from task output");
  }

  const SpikeTrain& features = trace.features(input);
  const bool has_feature = !spec.feature_block.empty();
  Matrix feature_adj = has_feature ? Matrix(steps, spec.feature_size()) : Matrix();
  Matrix* feature_adj_ptr = has_feature ? &feature_adj : nullptr;

  BackwardBlock(spec.label_block, trace.label, features, loss_grads.label, options,
                grads.label, feature_adj_ptr);
  if (trace.task_block_used) {
    BackwardBlock(spec.task_block, trace.task, features, loss_grads.task, options,
                  grads.task, feature_adj_ptr);
  }
  if (has_feature) {
    BackwardBlock(spec.feature_block, trace.feature, input, feature_adj, options,
                  grads.feature, nullptr);
  }
}

GradientSet backward(const ForwardTrace& trace, const Network& net,
                     const SpikeTrain& input, const OutputGrads& loss_grads,
                     const BackwardOptions& options) {
  GradientSet grads = GradientSet::ZerosLike(net);
  BackwardInto(trace, net, input, loss_grads, options, grads);
  return grads;
}

void OptimizerConfig::Validate() const {
  MTSNN_CHECK(lr >= 0.0 && std::isfinite(lr), "invalid-config", "lr must be >= 0");
  MTSNN_CHECK(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0,
              "invalid-config", "Adam betas must lie in [0, 1)");
  MTSNN_CHECK(epsilon > 0.0, "invalid-config", "Adam epsilon must be positive");
}

OptimizerState MakeOptimizerState(const Network& net) {
  return {0, GradientSet::ZerosLike(net), GradientSet::ZerosLike(net)};
}

void optimizer_step(Network& net, const GradientSet& grads, OptimizerState& state,
                    const OptimizerConfig& config) {
  config.Validate();
  CheckShapes(grads, net);
  CheckShapes(state.m, net);
  CheckShapes(state.v, net);
  if (!grads.AllFinite()) {
    Fail(ErrorKind::kRuntime, "non-finite-gradient",
         "gradient contains NaN or Inf; aborting update at step " +
             std::to_string(state.step));
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));

  auto update = [&](Matrix& w, const Matrix& g, Matrix& m, Matrix& v) {
    auto wd = w.data();
    const auto gd = g.data();
    if (config.kind == OptimizerKind::kSgd) {
      for (std::size_t k = 0; k < wd.size(); ++k) wd[k] -= config.lr * gd[k];
      return;
    }
    auto md = m.data();
    auto vd = v.data();
    for (std::size_t k = 0; k < wd.size(); ++k) {
      md[k] = config.beta1 * md[k] + (1.0 - config.beta1) * gd[k];
      vd[k] = config.beta2 * vd[k] + (1.0 - config.beta2) * gd[k] * gd[k];
      const double m_hat = md[k] / bc1;
      const double v_hat = vd[k] / bc2;
      wd[k] -= config.lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  };

  for (Block b : {Block::kFeature, Block::kLabel, Block::kTask}) {
    auto& layers = net.spec.block(b);
    for (std::size_t l = 0; l < layers.size(); ++l) {
      update(layers[l].weights, grads.block(b)[l].weights, state.m.block(b)[l].weights,
             state.v.block(b)[l].weights);
      if (layers[l].recurrent) {
        update(*layers[l].recurrent, grads.block(b)[l].recurrent,
               state.m.block(b)[l].recurrent, state.v.block(b)[l].recurrent);
      }
    }
  }
}

}  // namespace mtsnn
