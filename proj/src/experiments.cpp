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
#include "mtsnn/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "mtsnn/error.hpp"
#include "parallel.hpp"

namespace mtsnn {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Reference {
  SweepFamily family;
  double value;
  double task1;
  double task2;
};

constexpr Reference kReferences[] = {
    {SweepFamily::kThreshold, 1.5, 93.73, 98.00},
    {SweepFamily::kThreshold, 2.0, 95.40, 98.31},
    {SweepFamily::kThreshold, 3.0, 96.60, 98.90},
    {SweepFamily::kThreshold, 5.0, 97.86, 99.19},
    {SweepFamily::kThreshold, 10.0, 97.99, 99.13},
    {SweepFamily::kGamma, 0.1, 97.97, 100.00},
    {SweepFamily::kGamma, 0.2, 97.72, 100.00},
    {SweepFamily::kGamma, 0.3, 97.59, 100.00},
    {SweepFamily::kGamma, 0.5, 97.69, 100.00},
    {SweepFamily::kExtCurrent, 0.05, 95.63, 98.06},
    {SweepFamily::kExtCurrent, 0.1, 96.05, 97.86},
    {SweepFamily::kExtCurrent, 0.5, 96.07, 97.66},
    {SweepFamily::kExtCurrent, 1.0, 95.78, 97.62},
    {SweepFamily::kExtCurrent, 5.0, 92.20, 97.95},
};

constexpr double kBaseTask1 = 98.85;
constexpr double kBaseTask2 = 100.00;

double Percent(double fraction) { return std::isnan(fraction) ? kNaN : 100.0 * fraction; }

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

EpochMetrics TestMetrics(const Network& net, const ExperimentData& data,
                         const TrainConfig& cfg, std::size_t epoch) {
  EpochMetrics m;
  m.epoch = epoch;
  for (int task = 1; task <= 2; ++task) {
    const Segment seg = TaskSegment(net.spec, task);
    if (seg.begin == seg.end) continue;
    m.task[task - 1] = EvaluateMetrics(net, data.test, task, ControlFor(task, cfg, false),
                                       cfg.target_rates, cfg.jobs);
  }
  return m;
}

struct Point {
  double value = 0.0;
  std::uint64_t seed = 0;
};

std::vector<Point> Points(const SweepSpec& spec) {
  std::vector<double> values = spec.values;
  std::stable_sort(values.begin(), values.end());
  std::vector<std::uint64_t> seeds = spec.seeds;
  std::sort(seeds.begin(), seeds.end());
  std::vector<Point> points;
  for (double v : values) {
    for (std::uint64_t s : seeds) points.push_back({v, s});
  }
  return points;
}

ResultRow MakeRow(const SweepSpec& spec, const TrainConfig& cfg, const Point& p) {
  ResultRow row;
  row.family = FamilyName(spec.family);
  row.value = p.value;
  row.seed = p.seed;
  row.phi1 = cfg.phi1;
  row.phi2 = cfg.phi2;
  row.gamma = cfg.gamma;
  if (cfg.control_mode == ControlMode::kExternalCurrent) row.i_ext2 = cfg.i_ext2;
  row.epochs = cfg.epochs;
  row.t_steps = spec.t_steps;
  row.profile = ProfileName(spec.profile);
  const auto ref = ReferenceAccuracy(spec.family, p.value);
  row.ref_task1 = ref ? ref->first : kNaN;
  row.ref_task2 = ref ? ref->second : kNaN;
  return row;
}

TrainConfig PointConfig(const SweepSpec& spec, const Point& p) {
  TrainConfig cfg = spec.base_config;
  cfg.seed = p.seed;
  switch (spec.family) {
    case SweepFamily::kThreshold:
      cfg.phi2 = p.value;
      cfg.gamma = 0.0;
      cfg.use_task_block = false;
      cfg.control_mode = ControlMode::kThreshold;
      cfg.i_ext2.reset();
      break;
    case SweepFamily::kGamma:
      cfg.gamma = p.value;
      cfg.use_task_block = true;
      cfg.control_mode = ControlMode::kThreshold;
      cfg.i_ext2.reset();
      break;
    case SweepFamily::kExtCurrent:
      cfg.control_mode = ControlMode::kExternalCurrent;
      cfg.i_ext2 = p.value;
      cfg.phi2 = cfg.phi1;
      cfg.gamma = 0.0;
      cfg.use_task_block = false;
      break;
    case SweepFamily::kBaseCase:
      cfg.phi2 = cfg.phi1;
      cfg.gamma = 0.0;
      cfg.use_task_block = false;
      cfg.control_mode = ControlMode::kThreshold;
      cfg.i_ext2.reset();
      break;
  }
  return cfg;
}

SweepResult RunFamily(const SweepSpec& spec, const ExperimentData& data,
                      const ProgressSink& progress) {
  spec.Validate();
  const std::vector<Point> points = Points(spec);
  const std::size_t jobs = spec.base_config.jobs;
  const std::size_t inner_jobs = points.size() > 1 && jobs > 1 ? 1 : jobs;
  std::vector<ResultRow> rows(points.size());
  std::vector<RunCurve> curves;
  std::vector<std::vector<RunCurve>> point_curves(points.size());

  internal::ParallelFor(points.size(), jobs, [&](std::size_t k) {
    const Point& p = points[k];
    TrainConfig cfg = PointConfig(spec, p);
    cfg.jobs = inner_jobs;
    ResultRow row = MakeRow(spec, cfg, p);
    if (spec.family == SweepFamily::kBaseCase) {
      Architecture digits = spec.architecture;
      digits.num_labels_task2 = 0;
      TrainConfig c1 = cfg;
      c1.task_probability = 1.0;
      Architecture parity = spec.architecture;
      parity.num_labels_task1 = 0;
      TrainConfig c2 = cfg;
      c2.task_probability = 0.0;
      TrainOutcome o1 = TrainAndEvaluate(digits, c1, data, spec.eval_every);
      TrainOutcome o2 = TrainAndEvaluate(parity, c2, data, spec.eval_every);
      row.task1_acc = Percent(o1.task1_acc);
      row.task2_acc = Percent(o2.task2_acc);
      row.wall_s = o1.wall_s + o2.wall_s;
      point_curves[k].push_back({"base-task1", p.value, p.seed, c1, std::move(o1.metrics)});
      point_curves[k].push_back({"base-task2", p.value, p.seed, c2, std::move(o2.metrics)});
    } else {
      TrainOutcome o = TrainAndEvaluate(spec.architecture, cfg, data, spec.eval_every);
      row.task1_acc = Percent(o.task1_acc);
      row.task2_acc = Percent(o.task2_acc);
      row.wall_s = o.wall_s;
      point_curves[k].push_back({row.family, p.value, p.seed, cfg, std::move(o.metrics)});
    }
    rows[k] = row;
    if (progress) {
      char msg[160];
      std::snprintf(msg, sizeof(msg), "%s value=%g seed=%llu task1=%.2f task2=%.2f (%.1fs)",
                    row.family.c_str(), p.value, static_cast<unsigned long long>(p.seed),
                    row.task1_acc, row.task2_acc, row.wall_s);
      progress(msg);
    }
  });

  SweepResult result;
  result.rows = rows;
  for (const ResultRow& m : MeanRows(rows)) result.rows.push_back(m);
  for (auto& pc : point_curves) {
    for (auto& c : pc) result.curves.push_back(std::move(c));
  }
  return result;
}

void AppendCell(std::string& out, double v, const char* fmt) {
  if (std::isnan(v)) return;
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  out += buf;
}

std::string ModelLabel(const ResultRow& r) {
  char buf[96];
  if (r.family == "base") {
    std::snprintf(buf, sizeof(buf), "ST-SNN (base case)");
  } else if (r.family == "threshold") {
    std::snprintf(buf, sizeof(buf), "MT-SNN phi1=%g phi2=%g", r.phi1, r.phi2);
  } else if (r.family == "gamma") {
    std::snprintf(buf, sizeof(buf), "MT-SNN gamma=%g", r.gamma);
  } else {
    std::snprintf(buf, sizeof(buf), "MT-SNN-EC I_ext2=%g", r.value);
  }
  std::string label = buf;
  if (r.seed) {
    label += " (seed " + std::to_string(*r.seed) + ")";
  } else {
    label += " (mean)";
  }
  return label;
}

}  // namespace

std::string FamilyName(SweepFamily family) {
  switch (family) {
    case SweepFamily::kThreshold: return "threshold";
    case SweepFamily::kGamma: return "gamma";
    case SweepFamily::kExtCurrent: return "extcurrent";
    case SweepFamily::kBaseCase:
    default: return "base";
  }
}

SweepFamily ParseFamily(const std::string& name) {
  if (name == "threshold") return SweepFamily::kThreshold;
  if (name == "gamma") return SweepFamily::kGamma;
  if (name == "extcurrent") return SweepFamily::kExtCurrent;
  if (name == "base") return SweepFamily::kBaseCase;
  Fail(ErrorKind::kValidation, "invalid-family",
       "unknown sweep family '" + name + "' (threshold, gamma, extcurrent, base)");
}

std::string ProfileName(Profile profile) {
  return profile == Profile::kDesk ? "desk" : "full";
}

Profile ParseProfile(const std::string& name) {
  if (name == "full") return Profile::kFull;
  if (name == "desk") return Profile::kDesk;
  Fail(ErrorKind::kValidation, "invalid-config", "unknown profile '" + name + "'");
}

void SweepSpec::Validate() const {
  MTSNN_CHECK(!values.empty(), "invalid-config", "sweep needs at least one value");
  MTSNN_CHECK(!seeds.empty(), "invalid-config", "sweep needs at least one seed");
  MTSNN_CHECK(t_steps >= 1, "invalid-config", "t_steps must be >= 1");
  for (double v : values) {
    MTSNN_CHECK(std::isfinite(v), "invalid-config", "sweep values must be finite");
    if (family == SweepFamily::kThreshold) {
      MTSNN_CHECK(v > 0.0, "invalid-config", "threshold sweep values must be positive");
    } else if (family == SweepFamily::kGamma) {
      MTSNN_CHECK(v >= 0.0 && v <= 1.0, "invalid-config",
                  "gamma sweep values must lie in [0, 1]");
    }
  }
  base_config.Validate();
}

std::optional<std::pair<double, double>> ReferenceAccuracy(SweepFamily family, double value) {
  if (family == SweepFamily::kBaseCase) return std::make_pair(kBaseTask1, kBaseTask2);
  for (const Reference& r : kReferences) {
    if (r.family == family && std::abs(r.value - value) < 1e-9) {
      return std::make_pair(r.task1, r.task2);
    }
  }
  return std::nullopt;
}

TrainOutcome TrainAndEvaluate(const Architecture& arch, const TrainConfig& cfg,
                              const ExperimentData& data, std::size_t eval_every,
                              const EpochSink& sink) {
  const auto start = Clock::now();
  Architecture a = arch;
  a.neuron.threshold = cfg.phi1;
  a.num_tasks = cfg.use_task_block ? 2 : 0;
  Trainer trainer(build_mtsnn(a, cfg.seed), cfg);
  TrainOutcome out;
  out.config = cfg;
  for (std::size_t e = 1; e <= cfg.epochs; ++e) {
    const EpochMetrics m = trainer.train_epoch(data.train);
    out.metrics.Append(m, "train");
    if (sink) sink(m);
    if (eval_every > 0 && e % eval_every == 0 && e != cfg.epochs) {
      out.metrics.Append(TestMetrics(trainer.network(), data, cfg, e), "test");
    }
  }
  const EpochMetrics test = TestMetrics(trainer.network(), data, cfg, cfg.epochs);
  out.metrics.Append(test, "test");
  out.task1_acc = test.task[0].samples > 0 ? test.task[0].accuracy : kNaN;
  out.task2_acc = test.task[1].samples > 0 ? test.task[1].accuracy : kNaN;
  out.network = trainer.network();
  out.wall_s = Seconds(start);
  return out;
}

SweepResult RunSweep(const SweepSpec& spec, const ExperimentData& data,
                     const ProgressSink& progress) {
  return RunFamily(spec, data, progress);
}

SweepResult run_threshold_sweep(const SweepSpec& spec, const ExperimentData& data,
                                const ProgressSink& progress) {
  MTSNN_CHECK(spec.family == SweepFamily::kThreshold, "invalid-config", "not a threshold sweep");
  return RunFamily(spec, data, progress);
}

SweepResult run_gamma_sweep(const SweepSpec& spec, const ExperimentData& data,
                            const ProgressSink& progress) {
  MTSNN_CHECK(spec.family == SweepFamily::kGamma, "invalid-config", "not a gamma sweep");
  return RunFamily(spec, data, progress);
}

SweepResult run_ext_current_sweep(const SweepSpec& spec, const ExperimentData& data,
                                  const ProgressSink& progress) {
  MTSNN_CHECK(spec.family == SweepFamily::kExtCurrent, "invalid-config",
              "not an external-current sweep");
  return RunFamily(spec, data, progress);
}

SweepResult run_base_case(const SweepSpec& spec, const ExperimentData& data,
                          const ProgressSink& progress) {
  MTSNN_CHECK(spec.family == SweepFamily::kBaseCase, "invalid-config", "not a base-case run");
  return RunFamily(spec, data, progress);
}

std::vector<ResultRow> MeanRows(const std::vector<ResultRow>& rows) {
  std::map<std::pair<std::string, double>, std::vector<const ResultRow*>> groups;
  std::vector<std::pair<std::string, double>> order;
  for (const ResultRow& r : rows) {
    if (!r.seed) continue;
    const auto key = std::make_pair(r.family, r.value);
    if (groups.find(key) == groups.end()) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<ResultRow> means;
  for (const auto& key : order) {
    const auto& members = groups[key];
    ResultRow m = *members.front();
    m.seed.reset();
    double t1 = 0.0;
    double t2 = 0.0;
    double wall = 0.0;
    for (const ResultRow* r : members) {
      t1 += r->task1_acc;
      t2 += r->task2_acc;
      wall += r->wall_s;
    }
    const double n = static_cast<double>(members.size());
    m.task1_acc = t1 / n;
    m.task2_acc = t2 / n;
    m.wall_s = wall;
    means.push_back(m);
  }
  return means;
}

std::string emit_table(const std::vector<ResultRow>& rows, TableFormat format) {
  MTSNN_CHECK(!rows.empty(), "empty-rows", "no result rows to emit");
  std::string out;
  if (format == TableFormat::kCsv) {
    out =
        "family,value,seed,task1_acc,task2_acc,phi1,phi2,gamma,i_ext2,epochs,t_steps,"
        "profile,wall_s,ref_task1,ref_task2\n";
    for (const ResultRow& r : rows) {
      out += r.family + ",";
      AppendCell(out, r.value, "%g");
      out += ",";
      out += r.seed ? std::to_string(*r.seed) : "mean";
      out += ",";
      AppendCell(out, r.task1_acc, "%.2f");
      out += ",";
      AppendCell(out, r.task2_acc, "%.2f");
      out += ",";
      AppendCell(out, r.phi1, "%g");
      out += ",";
      AppendCell(out, r.phi2, "%g");
      out += ",";
      AppendCell(out, r.gamma, "%g");
      out += ",";
      if (r.i_ext2) AppendCell(out, *r.i_ext2, "%g");
      out += "," + std::to_string(r.epochs) + "," + std::to_string(r.t_steps) + "," +
             r.profile + ",";
      AppendCell(out, r.wall_s, "%.3f");
      out += ",";
      AppendCell(out, r.ref_task1, "%.2f");
      out += ",";
      AppendCell(out, r.ref_task2, "%.2f");
      out += "\n";
    }
    return out;
  }
  out =
      "| Model | Task 1 (%) | Task 2 (%) | Reference task 1 (%) | Reference task 2 (%) |\n"
      "|---|---:|---:|---:|---:|\n";
  for (const ResultRow& r : rows) {
    out += "| " + ModelLabel(r) + " | ";
    AppendCell(out, r.task1_acc, "%.2f");
    out += " | ";
    AppendCell(out, r.task2_acc, "%.2f");
    out += " | ";
    AppendCell(out, r.ref_task1, "%.2f");
    out += " | ";
    AppendCell(out, r.ref_task2, "%.2f");
    out += " |\n";
  }
  return out;
}

std::string CurveFileName(const std::string& family, double value, std::uint64_t seed) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%s_%g_%llu.svg", family.c_str(), value,
                static_cast<unsigned long long>(seed));
  return buf;
}

std::string RenderCurveSvg(const RunMetrics& metrics, const std::string& title) {
  constexpr double kWidth = 640.0;
  constexpr double kPanel = 220.0;
  constexpr double kLeft = 60.0;
  constexpr double kRight = 150.0;
  constexpr double kTop = 40.0;
  constexpr double kGap = 50.0;
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  std::size_t max_epoch = 1;
  double max_loss = 0.0;
  for (const MetricsRow& r : metrics.rows) {
    max_epoch = std::max(max_epoch, r.epoch);
    if (std::isfinite(r.loss)) max_loss = std::max(max_loss, r.loss);
  }
  if (max_loss <= 0.0) max_loss = 1.0;
  const double plot_w = kWidth - kLeft - kRight;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kTop + 2 * kPanel + kGap + 40 << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::string escaped;
  for (char c : title) {
    if (c == '<') escaped += "&lt;";
    else if (c == '>') escaped += "&gt;";
    else if (c == '&') escaped += "&amp;";
    else escaped += c;
  }
  svg << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"14\">" << escaped << "</text>\n";

  for (int panel = 0; panel < 2; ++panel) {
    const double top = kTop + panel * (kPanel + kGap);
    const double ymax = panel == 0 ? max_loss : 1.0;
    svg << "<rect x=\"" << kLeft << "\" y=\"" << top << "\" width=\"" << plot_w
        << "\" height=\"" << kPanel << "\" fill=\"none\" stroke=\"#444\"/>\n";
    svg << "<text x=\"8\" y=\"" << top + kPanel / 2 << "\">"
        << (panel == 0 ? "loss" : "accuracy") << "</text>\n";
    char tick[64];
    std::snprintf(tick, sizeof(tick), "%.3g", ymax);
    svg << "<text x=\"" << kLeft - 4 << "\" y=\"" << top + 10
        << "\" text-anchor=\"end\">" << tick << "</text>\n";
    svg << "<text x=\"" << kLeft - 4 << "\" y=\"" << top + kPanel
        << "\" text-anchor=\"end\">0</text>\n";
    svg << "<text x=\"" << kLeft + plot_w << "\" y=\"" << top + kPanel + 16
        << "\" text-anchor=\"end\">epoch " << max_epoch << "</text>\n";

    int series = 0;
    for (const char* split : {"train", "test"}) {
      for (int task = 1; task <= 2; ++task, ++series) {
        std::string points;
        for (const MetricsRow& r : metrics.rows) {
          if (r.split != split || r.task != task) continue;
          const double v = panel == 0 ? r.loss : r.accuracy;
          if (!std::isfinite(v)) continue;
          const double x = kLeft + plot_w * static_cast<double>(r.epoch) /
                                       static_cast<double>(max_epoch);
          const double y = top + kPanel * (1.0 - std::clamp(v / ymax, 0.0, 1.0));
          char pt[48];
          std::snprintf(pt, sizeof(pt), "%.1f,%.1f ", x, y);
          points += pt;
        }
        if (points.empty()) continue;
        svg << "<polyline fill=\"none\" stroke=\"" << colors[series]
            << "\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
        if (panel == 0) {
          const double ly = kTop + 16.0 * series + 10;
          svg << "<line x1=\"" << kWidth - kRight + 10 << "\" y1=\"" << ly << "\" x2=\""
              << kWidth - kRight + 30 << "\" y2=\"" << ly << "\" stroke=\"" << colors[series]
              << "\" stroke-width=\"2\"/>\n";
          svg << "<text x=\"" << kWidth - kRight + 36 << "\" y=\"" << ly + 4 << "\">" << split
              << " task " << task << "</text>\n";
        }
      }
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace mtsnn
