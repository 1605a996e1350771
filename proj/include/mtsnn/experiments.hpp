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
// Experiment families: threshold sweep, gamma sweep with the task head,
// external-current control and the single-task base case.
//
// Every (value, seed) point trains from its own seed-derived initialization,
// so rows do not depend on the order or concurrency in which points run.
// Full-scale reference accuracies are carried as ref_task1/ref_task2 columns
// next to the observed values.

#ifndef MTSNN_EXPERIMENTS_HPP_
#define MTSNN_EXPERIMENTS_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mtsnn/graph.hpp"
#include "mtsnn/train.hpp"

namespace mtsnn {

enum class SweepFamily { kThreshold, kGamma, kExtCurrent, kBaseCase };
enum class Profile { kFull, kDesk };

std::string FamilyName(SweepFamily family);  // threshold | gamma | extcurrent | base
SweepFamily ParseFamily(const std::string& name);
std::string ProfileName(Profile profile);
Profile ParseProfile(const std::string& name);

struct ExperimentData {
  std::vector<SampleData> train;
  std::vector<SampleData> test;
};

struct SweepSpec {
  SweepFamily family = SweepFamily::kThreshold;
  std::vector<double> values;
  TrainConfig base_config;
  Architecture architecture;
  Profile profile = Profile::kFull;
  std::vector<std::uint64_t> seeds = {0};
  std::size_t t_steps = 300;
  std::size_t eval_every = 0;

  // Throws invalid-config.
  void Validate() const;
};

struct ResultRow {
  std::string family;
  double value = 0.0;
  std::optional<std::uint64_t> seed;  // empty: mean over seeds
  double task1_acc = 0.0;             // percent; NaN when not measured
  double task2_acc = 0.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
  double gamma = 0.0;
  std::optional<double> i_ext2;
  std::size_t epochs = 0;
  std::size_t t_steps = 0;
  std::string profile;
  double wall_s = 0.0;
  double ref_task1 = 0.0;  // full-scale reference, NaN when none
  double ref_task2 = 0.0;
};

// Full-scale reference accuracies for a family/value, if tabulated.
std::optional<std::pair<double, double>> ReferenceAccuracy(SweepFamily family, double value);

struct TrainOutcome {
  Network network;
  RunMetrics metrics;
  TrainConfig config;
  double task1_acc = 0.0;  // fraction
  double task2_acc = 0.0;
  double wall_s = 0.0;
};

using EpochSink = std::function<void(const EpochMetrics&)>;

// Builds the network from the architecture and cfg.seed, trains for cfg.epochs, and
// evaluates both tasks (or the one task the label block supports) on the
// test split. Metrics hold one train row per task and epoch, plus test rows
// every eval_every epochs and after the last one.
TrainOutcome TrainAndEvaluate(const Architecture& arch, const TrainConfig& cfg,
                              const ExperimentData& data, std::size_t eval_every = 0,
                              const EpochSink& sink = {});

struct RunCurve {
  std::string family;
  double value = 0.0;
  std::uint64_t seed = 0;
  TrainConfig config;
  RunMetrics metrics;
};

struct SweepResult {
  std::vector<ResultRow> rows;  // per-seed rows sorted by value then seed, then means
  std::vector<RunCurve> curves;
};

using ProgressSink = std::function<void(const std::string&)>;

SweepResult RunSweep(const SweepSpec& spec, const ExperimentData& data,
                     const ProgressSink& progress = {});
SweepResult run_threshold_sweep(const SweepSpec& spec, const ExperimentData& data,
                                const ProgressSink& progress = {});
SweepResult run_gamma_sweep(const SweepSpec& spec, const ExperimentData& data,
                            const ProgressSink& progress = {});
SweepResult run_ext_current_sweep(const SweepSpec& spec, const ExperimentData& data,
                                  const ProgressSink& progress = {});
// One row per seed: task1_acc from a digit-only network, task2_acc from a
// parity-only network, both at phi1 without a task head.
SweepResult run_base_case(const SweepSpec& spec, const ExperimentData& data,
                          const ProgressSink& progress = {});

// Mean row per value, appended after the per-seed rows.
std::vector<ResultRow> MeanRows(const std::vector<ResultRow>& rows);

enum class TableFormat { kCsv, kMarkdown };

// Throws empty-rows.
std::string emit_table(const std::vector<ResultRow>& rows, TableFormat format);

std::string CurveFileName(const std::string& family, double value, std::uint64_t seed);
// Two-panel line chart (loss, accuracy) of the per-epoch metrics.
std::string RenderCurveSvg(const RunMetrics& metrics, const std::string& title);

}  // namespace mtsnn

#endif  // MTSNN_EXPERIMENTS_HPP_
