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
#include "mtsnn/train.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "mtsnn/error.hpp"
#include "parallel.hpp"

namespace mtsnn {
namespace {

int TruthFor(int task, int digit, int parity) { return task == 1 ? digit : parity; }

void ScaleInPlace(Matrix& m, double k) {
  for (double& x : m.data()) x *= k;
}

}  // namespace

std::string ControlModeName(ControlMode mode) {
  return mode == ControlMode::kThreshold ? "threshold" : "extcurrent";
}

void TrainConfig::Validate() const {
  MTSNN_CHECK(gamma >= 0.0 && gamma <= 1.0, "invalid-config",
              "gamma must lie in [0, 1], got " + std::to_string(gamma));
  MTSNN_CHECK(phi1 > 0.0 && phi2 > 0.0, "invalid-config", "thresholds must be positive");
  MTSNN_CHECK(task_probability >= 0.0 && task_probability <= 1.0, "invalid-config",
              "task_probability must lie in [0, 1]");
  MTSNN_CHECK(batch_size >= 1, "invalid-config", "batch_size must be >= 1");
  MTSNN_CHECK(lr >= 0.0 && std::isfinite(lr), "invalid-config", "lr must be >= 0");
  MTSNN_CHECK(control_mode != ControlMode::kExternalCurrent || i_ext2.has_value(),
              "invalid-config", "external-current control needs i_ext2");
  MTSNN_CHECK(target_rates.true_rate >= 0.0 && target_rates.false_rate >= 0.0 &&
                  target_rates.true_rate <= 1.0 && target_rates.false_rate <= 1.0,
              "invalid-config", "target rates must lie in [0, 1] spikes per step");
  MTSNN_CHECK(jobs >= 1, "invalid-config", "jobs must be >= 1");
  surrogate.Validate();
  optimizer_config().Validate();
}

OptimizerConfig TrainConfig::optimizer_config() const {
  OptimizerConfig oc;
  oc.kind = optimizer;
  oc.lr = lr;
  oc.beta1 = adam_beta1;
  oc.beta2 = adam_beta2;
  oc.epsilon = adam_epsilon;
  return oc;
}

ForwardOptions ControlFor(int task, const TrainConfig& cfg, bool use_task_block) {
  MTSNN_CHECK(task == 1 || task == 2, "invalid-task", "task must be 1 or 2");
  ForwardOptions opts;
  opts.use_task_block = use_task_block;
  if (cfg.control_mode == ControlMode::kThreshold) {
    opts.threshold = task == 1 ? cfg.phi1 : cfg.phi2;
  } else {
    opts.threshold = cfg.phi1;
    opts.i_ext = task == 1 ? 0.0 : cfg.i_ext2.value_or(0.0);
  }
  return opts;
}

Segment TaskSegment(const NetworkSpec& spec, int task) {
  MTSNN_CHECK(task == 1 || task == 2, "invalid-task", "task must be 1 or 2");
  if (task == 1) return {0, spec.num_labels_task1};
  return {spec.num_labels_task1, spec.num_labels_task1 + spec.num_labels_task2};
}

int select_task(Rng& rng, double task_probability) {
  return rng.Uniform() < task_probability ? 1 : 2;
}

TargetSpec make_targets(int digit, int task, const TargetRates& rates,
                        std::size_t t_steps, std::size_t labels_task1,
                        std::size_t labels_task2) {
  MTSNN_CHECK(task == 1 || task == 2, "invalid-task", "task must be 1 or 2");
  const TaskLabels labels = derive_labels(digit);
  const double hi = rates.true_rate * static_cast<double>(t_steps);
  const double lo = rates.false_rate * static_cast<double>(t_steps);
  TargetSpec spec;
  spec.label_target.assign(labels_task1 + labels_task2, lo);
  const std::size_t active = task == 1 ? static_cast<std::size_t>(labels.task1)
                                       : labels_task1 + static_cast<std::size_t>(labels.task2);
  MTSNN_CHECK((task == 1 && active < labels_task1) ||
                  (task == 2 && active < labels_task1 + labels_task2),
              "invalid-task", "label does not fit the task's output segment");
  spec.label_target[active] = hi;
  spec.task_target = {lo, lo};
  spec.task_target[static_cast<std::size_t>(task - 1)] = hi;
  return spec;
}

RateLoss rate_loss(const Matrix& output_spikes, std::span<const double> target) {
  MTSNN_CHECK(output_spikes.cols() == target.size(), "shape-mismatch",
              "target has " + std::to_string(target.size()) + " entries for " +
                  std::to_string(output_spikes.cols()) + " outputs");
  const std::size_t steps = output_spikes.rows();
  MTSNN_CHECK(steps > 0, "shape-mismatch", "output has no time steps");
  const double t = static_cast<double>(steps);
  std::vector<double> counts(target.size(), 0.0);
  for (std::size_t s = 0; s < steps; ++s) {
    const auto row = output_spikes.row(s);
    for (std::size_t k = 0; k < row.size(); ++k) counts[k] += row[k];
  }
  RateLoss out;
  out.grad = Matrix(steps, target.size());
  for (std::size_t k = 0; k < target.size(); ++k) {
    const double diff = counts[k] - target[k];
    out.loss += 0.5 * diff * diff / t;
    const double g = diff / t;
    for (std::size_t s = 0; s < steps; ++s) out.grad(s, k) = g;
  }
  return out;
}

double total_loss(double label_loss, double task_loss, double gamma) {
  return (1.0 - gamma) * label_loss + gamma * task_loss;
}

int Predict(const Matrix& output_spikes, Segment segment) {
  MTSNN_CHECK(segment.end <= output_spikes.cols() && segment.begin < segment.end,
              "shape-mismatch", "segment outside the output layer");
  std::vector<double> counts(segment.end - segment.begin, 0.0);
  for (std::size_t s = 0; s < output_spikes.rows(); ++s) {
    const auto row = output_spikes.row(s);
    for (std::size_t k = segment.begin; k < segment.end; ++k) counts[k - segment.begin] += row[k];
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < counts.size(); ++k) {
    if (counts[k] > counts[best]) best = k;
  }
  return static_cast<int>(best);
}

void RunMetrics::Append(const EpochMetrics& m, const std::string& split) {
  for (int t = 0; t < 2; ++t) {
    if (m.task[t].samples == 0) continue;
    rows.push_back({m.epoch, split, t + 1, m.task[t].loss, m.task[t].accuracy});
  }
}

void RunMetrics::WriteCsv(std::ostream& out, const TrainConfig& cfg) const {
  out << "epoch,split,task,loss,accuracy,phi1,phi2,gamma,control_mode,seed\n";
  char line[256];
  for (const MetricsRow& r : rows) {
    std::snprintf(line, sizeof(line), "%zu,%s,%d,%.9g,%.6f,%g,%g,%g,%s,%llu\n", r.epoch,
                  r.split.c_str(), r.task, r.loss, r.accuracy, cfg.phi1, cfg.phi2,
                  cfg.gamma, ControlModeName(cfg.control_mode).c_str(),
                  static_cast<unsigned long long>(cfg.seed));
    out << line;
  }
}

std::vector<SampleData> LoadSamples(const DatasetIndex& index, std::size_t t_steps,
                                    std::uint32_t bin_width_us) {
  std::vector<SampleData> out;
  out.reserve(index.size());
  for (const SampleRef& ref : index.samples) {
    LabeledSample s = LoadSample(ref, t_steps, bin_width_us);
    out.push_back({s.tensor.train(), s.digit, s.parity});
  }
  return out;
}

Trainer::Trainer(Network net, TrainConfig cfg)
    : net_(std::move(net)),
      cfg_(std::move(cfg)),
      opt_(MakeOptimizerState(net_)),
      rng_(DeriveSeed(cfg_.seed, 0x7A5C)) {
  cfg_.Validate();
  net_.spec.Validate();
  MTSNN_CHECK(!cfg_.use_task_block || !net_.spec.task_block.empty(), "invalid-config",
              "use_task_block set but the network has no task block");
}

Trainer::SampleOutcome Trainer::RunSample(const SampleData& sample, int task,
                                          GradientSet& grads) const {
  const ForwardOptions opts = ControlFor(task, cfg_, cfg_.use_task_block);
  const ForwardTrace trace = Forward(net_, sample.input, opts);
  const TargetSpec targets =
      make_targets(sample.digit, task, cfg_.target_rates, trace.steps,
                   net_.spec.num_labels_task1, net_.spec.num_labels_task2);
  RateLoss label = rate_loss(trace.label_output(), targets.label_target);
  OutputGrads g;
  g.label = std::move(label.grad);
  ScaleInPlace(g.label, 1.0 - cfg_.gamma);
  double task_loss = 0.0;
  if (cfg_.use_task_block) {
    RateLoss t = rate_loss(trace.task_output(), targets.task_target);
    task_loss = t.loss;
    g.task = std::move(t.grad);
    ScaleInPlace(g.task, cfg_.gamma);
  }
  const double loss = total_loss(label.loss, task_loss, cfg_.gamma);
  if (!std::isfinite(loss)) {
    Fail(ErrorKind::kRuntime, "non-finite-loss",
         "loss is not finite (label " + std::to_string(label.loss) + ", task " +
             std::to_string(task_loss) + ")");
  }
  BackwardInto(trace, net_, sample.input, g, {cfg_.surrogate, cfg_.detach_reset}, grads);
  const int predicted = Predict(trace.label_output(), TaskSegment(net_.spec, task));
  return {loss, predicted == TruthFor(task, sample.digit, sample.parity)};
}

EpochMetrics Trainer::train_epoch(const std::vector<SampleData>& data) {
  MTSNN_CHECK(!data.empty(), "invalid-config", "training set is empty");
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  rng_.Shuffle(std::span<std::size_t>(order));

  EpochMetrics metrics;
  metrics.epoch = ++epoch_;
  double loss_sum[2] = {0.0, 0.0};
  std::size_t correct[2] = {0, 0};
  const OptimizerConfig oc = cfg_.optimizer_config();
  GradientSet batch = GradientSet::ZerosLike(net_);
  const std::size_t slots = std::min(cfg_.jobs, cfg_.batch_size);
  std::vector<GradientSet> sample_grads(slots > 1 ? cfg_.batch_size : 1,
                                        GradientSet::ZerosLike(net_));

  for (std::size_t start = 0; start < order.size(); start += cfg_.batch_size) {
    const std::size_t len = std::min(cfg_.batch_size, order.size() - start);
    const int task = select_task(rng_, cfg_.task_probability);
    std::vector<SampleOutcome> outcomes(len);
    batch.SetZero();
    if (slots > 1) {
      internal::ParallelFor(len, cfg_.jobs, [&](std::size_t k) {
        sample_grads[k].SetZero();
        outcomes[k] = RunSample(data[order[start + k]], task, sample_grads[k]);
      });
      for (std::size_t k = 0; k < len; ++k) batch.Add(sample_grads[k]);
    } else {
      for (std::size_t k = 0; k < len; ++k) {
        sample_grads[0].SetZero();
        outcomes[k] = RunSample(data[order[start + k]], task, sample_grads[0]);
        batch.Add(sample_grads[0]);
      }
    }
    batch.Scale(1.0 / static_cast<double>(len));
    optimizer_step(net_, batch, opt_, oc);
    for (const SampleOutcome& o : outcomes) {
      loss_sum[task - 1] += o.loss;
      correct[task - 1] += o.correct ? 1 : 0;
    }
    metrics.task[task - 1].samples += len;
  }
  double total = 0.0;
  for (int t = 0; t < 2; ++t) {
    const std::size_t n = metrics.task[t].samples;
    total += loss_sum[t];
    if (n == 0) continue;
    metrics.task[t].loss = loss_sum[t] / static_cast<double>(n);
    metrics.task[t].accuracy = static_cast<double>(correct[t]) / static_cast<double>(n);
  }
  metrics.mean_loss = total / static_cast<double>(data.size());
  return metrics;
}

TaskMetrics EvaluateMetrics(const Network& net, const std::vector<SampleData>& data,
                            int task, const ForwardOptions& control, const TargetRates& rates,
                            std::size_t jobs) {
  MTSNN_CHECK(!data.empty(), "invalid-config", "evaluation set is empty");
  ForwardOptions opts = control;
  opts.use_task_block = false;
  opts.mode = SpikeMode::kBinary;
  const Segment segment = TaskSegment(net.spec, task);
  std::vector<char> hit(data.size(), 0);
  std::vector<double> loss(data.size(), 0.0);
  internal::ParallelFor(data.size(), jobs, [&](std::size_t k) {
    const ForwardTrace trace = Forward(net, data[k].input, opts);
    const TargetSpec targets =
        make_targets(data[k].digit, task, rates, trace.steps, net.spec.num_labels_task1,
                     net.spec.num_labels_task2);
    loss[k] = rate_loss(trace.label_output(), targets.label_target).loss;
    hit[k] = Predict(trace.label_output(), segment) ==
             TruthFor(task, data[k].digit, data[k].parity);
  });
  TaskMetrics m;
  m.samples = data.size();
  const double n = static_cast<double>(data.size());
  for (double l : loss) m.loss += l;
  m.loss /= n;
  m.accuracy = static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / n;
  return m;
}

double EvaluateWith(const Network& net, const std::vector<SampleData>& data, int task,
                    const ForwardOptions& control, std::size_t jobs) {
  return EvaluateMetrics(net, data, task, control, TargetRates{}, jobs).accuracy;
}

double evaluate(const Network& net, const std::vector<SampleData>& data, int task,
                const TrainConfig& cfg) {
  return EvaluateWith(net, data, task, ControlFor(task, cfg, false), cfg.jobs);
}

}  // namespace mtsnn
