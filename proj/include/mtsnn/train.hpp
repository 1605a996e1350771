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

// Multi-task training with threshold (or external current) task control.
//
// Per batch: draw the samples, draw the task, set the control signal on the
// feature and label blocks, run forward, score the concatenated label target
// (and the task head when enabled), combine as
//
//   L = (1 - gamma) * L_label + gamma * L_task,
//
// backpropagate and take one optimizer step. The task head always runs at
// its stored threshold and there is no gradient reversal in front of it.

#ifndef MTSNN_TRAIN_HPP_
#define MTSNN_TRAIN_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mtsnn/data.hpp"
#include "mtsnn/grad.hpp"
#include "mtsnn/graph.hpp"
#include "mtsnn/random.hpp"

namespace mtsnn {

enum class ControlMode { kThreshold, kExternalCurrent };

std::string ControlModeName(ControlMode mode);

struct TargetRates {
  double true_rate = 0.5;    // spikes per step for the correct unit
  double false_rate = 0.05;  // spikes per step for every other unit
};

struct TrainConfig {
  double phi1 = 1.25;
  double phi2 = 5.0;
  double gamma = 0.0;
  double task_probability = 0.5;  // P(task 1)
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  ControlMode control_mode = ControlMode::kThreshold;
  std::optional<double> i_ext2;
  bool use_task_block = false;
  SurrogateSpec surrogate;
  TargetRates target_rates;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  bool detach_reset = false;
  std::size_t jobs = 1;

  void Validate() const;
  OptimizerConfig optimizer_config() const;
};

// Control signal for the feature and label blocks while `task` (1 or 2) runs.
ForwardOptions ControlFor(int task, const TrainConfig& cfg, bool use_task_block);

// Output index range [begin, end) of a task's labels.
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
};
Segment TaskSegment(const NetworkSpec& spec, int task);

int select_task(Rng& rng, double task_probability);

struct TargetSpec {
  std::vector<double> label_target;  // desired spike counts over T
  std::vector<double> task_target;
};

TargetSpec make_targets(int digit, int task, const TargetRates& rates,
                        std::size_t t_steps, std::size_t labels_task1 = 10,
                        std::size_t labels_task2 = 2);

struct RateLoss {
  double loss = 0.0;
  Matrix grad;  // dL/dS, steps x neurons
};

// loss = 1/2 sum_k (count_k - target_k)^2 / T, grad = (count_k - target_k) / T
// at every step.
RateLoss rate_loss(const Matrix& output_spikes, std::span<const double> target);

double total_loss(double label_loss, double task_loss, double gamma);

// argmax of spike counts within the segment, lowest index on ties; the
// returned index is relative to segment.begin.
int Predict(const Matrix& output_spikes, Segment segment);

struct TaskMetrics {
  double loss = 0.0;
  double accuracy = 0.0;
  std::size_t samples = 0;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  TaskMetrics task[2];
  double mean_loss = 0.0;
};

struct MetricsRow {
  std::size_t epoch = 0;
  std::string split;
  int task = 0;
  double loss = 0.0;
  double accuracy = 0.0;
};

struct RunMetrics {
  std::vector<MetricsRow> rows;
  void Append(const EpochMetrics& m, const std::string& split);
  // Header: epoch,split,task,loss,accuracy,phi1,phi2,gamma,control_mode,seed
  void WriteCsv(std::ostream& out, const TrainConfig& cfg) const;
};

struct SampleData {
  SpikeTrain input;
  int digit = 0;
  int parity = 0;
};

std::vector<SampleData> LoadSamples(const DatasetIndex& index, std::size_t t_steps,
                                    std::uint32_t bin_width_us);

class Trainer {
 public:
  Trainer(Network net, TrainConfig cfg);

  // One pass over the data in a freshly shuffled order.
  EpochMetrics train_epoch(const std::vector<SampleData>& data);

  const Network& network() const { return net_; }
  Network& network() { return net_; }
  const TrainConfig& config() const { return cfg_; }
  std::size_t epochs_done() const { return epoch_; }

 private:
  struct SampleOutcome {
    double loss = 0.0;
    bool correct = false;
  };
  SampleOutcome RunSample(const SampleData& sample, int task, GradientSet& grads) const;

  Network net_;
  TrainConfig cfg_;
  OptimizerState opt_;
  Rng rng_;
  std::size_t epoch_ = 0;
};

// Fraction of samples whose prediction under `task`'s control signal matches
// the task's label. The task block is never run.
double evaluate(const Network& net, const std::vector<SampleData>& data, int task,
                const TrainConfig& cfg);

// Same, with an explicit control signal (e.g. task 1 scored under phi2).
double EvaluateWith(const Network& net, const std::vector<SampleData>& data, int task,
                    const ForwardOptions& control, std::size_t jobs = 1);

// Accuracy plus the mean label rate loss against `rates`.
TaskMetrics EvaluateMetrics(const Network& net, const std::vector<SampleData>& data,
                            int task, const ForwardOptions& control, const TargetRates& rates,
                            std::size_t jobs = 1);

}  // namespace mtsnn

#endif  // MTSNN_TRAIN_HPP_
