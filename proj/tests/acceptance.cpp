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

// Acceptance runner. --fast covers criteria 1-4, 8 and 9; --desk covers
// 5, 6, 7 and 10 on generated fixtures. Prints one PASS/FAIL line each.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "mtsnn/config.hpp"
#include "mtsnn/data.hpp"
#include "mtsnn/experiments.hpp"
#include "mtsnn/fetch.hpp"
#include "mtsnn/graph.hpp"
#include "mtsnn/synthetic.hpp"
#include "mtsnn/train.hpp"
#include "oracles.hpp"
#include "toy.hpp"

using namespace mtsnn;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int g_failures = 0;

void Report(int id, bool pass, const std::string& detail, Clock::time_point start) {
  const double s = std::chrono::duration<double>(Clock::now() - start).count();
  std::printf("%s criterion %d: %s (%.2fs)\n", pass ? "PASS" : "FAIL", id, detail.c_str(), s);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string Fmt(const char* fmt, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c, d);
  return buf;
}

void Criterion1() {
  const auto start = Clock::now();
  std::mt19937_64 gen(2026);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  };
  int exact = 0;
  for (int trial = 0; trial < 100; ++trial) {
    testing::ScalarNeuron ref;
    ref.tau_mem = uniform(1.0, 50.0);
    ref.tau_syn = uniform(0.5, 30.0);
    ref.phi = uniform(0.1, 3.0);
    ref.i_ext = uniform(-0.1, 0.5);
    ref.reset_by_threshold = gen() % 2 == 0;
    ref.w = uniform(0.1, 2.0);
    std::vector<double> x(100);
    for (double& v : x) v = uniform(0.0, 1.0) < 0.3 ? uniform(0.0, 1.5) : 0.0;

    LayerSpec layer;
    layer.in_size = 1;
    layer.out_size = 1;
    layer.weights = Matrix(1, 1);
    layer.weights(0, 0) = ref.w;
    layer.neuron.tau_mem = ref.tau_mem;
    layer.neuron.tau_syn = ref.tau_syn;
    layer.neuron.threshold = ref.phi;
    layer.neuron.i_ext = ref.i_ext;
    layer.neuron.reset_mode =
        ref.reset_by_threshold ? ResetMode::kSubtractThreshold : ResetMode::kSubtractSpike;
    const SpikeTrain input = SpikeTrain::FromDense(x, 1, x.size());
    const LayerTrace tr = RunLayer(layer, layer.neuron, input, SpikeMode::kBinary, {});
    const testing::ScalarTrace oracle = testing::SimulateScalar(ref, x);
    bool same = true;
    for (std::size_t t = 0; t < x.size(); ++t) {
      same &= tr.u(t, 0) == oracle.u[t] && tr.i(t, 0) == oracle.i[t] && tr.s(t, 0) == oracle.s[t];
    }
    exact += same;
  }
  const double s = std::chrono::duration<double>(Clock::now() - start).count();
  Report(1, exact == 100 && s < 1.0,
         std::to_string(exact) + "/100 configurations bit-identical to the scalar oracle", start);
}

void Criterion2() {
  const auto start = Clock::now();
  std::size_t checked = 0, passed = 0, max_neurons = 0, max_steps = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = testing::CheckRandomNetwork(seed);
    checked += r.checked;
    passed += r.passed;
    max_neurons = std::max(max_neurons, r.neurons);
    max_steps = std::max(max_steps, r.steps);
  }
  const double frac = static_cast<double>(passed) / static_cast<double>(checked);
  const double s = std::chrono::duration<double>(Clock::now() - start).count();
  Report(2, frac >= 0.99 && max_neurons <= 32 && max_steps <= 10 && s < 60.0,
         Fmt("%.0f/%.0f weight gradients agree (%.2f%%), max %.0f neurons", passed, checked,
             100.0 * frac, max_neurons),
         start);
}

void Criterion3() {
  const auto start = Clock::now();
  std::mt19937_64 gen(55);
  std::vector<Event> events(1000);
  for (Event& e : events) {
    e.x = static_cast<std::uint8_t>(gen() % 34);
    e.y = static_cast<std::uint8_t>(gen() % 34);
    e.polarity = static_cast<std::uint8_t>(gen() % 2);
    e.t_us = static_cast<std::uint32_t>(gen() % (1u << 23));
  }
  const auto bytes = encode_nmnist_file(events);
  bool ok = bytes.size() == 5000 && parse_nmnist_file(bytes) == events;
  // Records as bytes: re-encoding the parse reproduces the input exactly.
  ok &= encode_nmnist_file(parse_nmnist_file(bytes)) == bytes;
  const std::vector<std::uint8_t> v1 = {0x21, 0x10, 0x80, 0x00, 0x0A};
  ok &= parse_nmnist_file(v1) == std::vector<Event>{{33, 16, 1, 10}};
  const std::vector<std::uint8_t> v2(5, 0);
  ok &= parse_nmnist_file(v2) == std::vector<Event>{{0, 0, 0, 0}};
  const std::vector<std::uint8_t> v3(6, 0);
  ok &= testing::ErrorCodeOf([&] { parse_nmnist_file(v3); }) == "truncated-record";
  const double s = std::chrono::duration<double>(Clock::now() - start).count();
  Report(3, ok && s < 1.0, "1000-record round trip and fixed vectors", start);
}

bool SameBlock(const std::vector<LayerSpec>& a, const std::vector<LayerSpec>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!(a[k].weights == b[k].weights)) return false;
  }
  return true;
}

void Criterion4() {
  const auto start = Clock::now();
  const auto train = testing::ToyData(4, 20, 17);
  TrainConfig plain;
  plain.batch_size = 8;
  plain.lr = 0.01;
  plain.seed = 21;
  plain.phi2 = 3.0;
  TrainConfig with = plain;
  with.use_task_block = true;
  with.gamma = 0.0;
  Trainer a(build_mtsnn(testing::ToyArch(0), 21), plain);
  Trainer b(build_mtsnn(testing::ToyArch(2), 21), with);
  bool losses_equal = true;
  for (int e = 0; e < 5; ++e) losses_equal &= a.train_epoch(train).mean_loss == b.train_epoch(train).mean_loss;
  const bool zero_ok = losses_equal &&
                       SameBlock(a.network().spec.feature_block, b.network().spec.feature_block) &&
                       SameBlock(a.network().spec.label_block, b.network().spec.label_block);

  TrainConfig one = with;
  one.gamma = 1.0;
  const Network start_net = build_mtsnn(testing::ToyArch(2), 22);
  Trainer c(start_net, one);
  for (int e = 0; e < 5; ++e) c.train_epoch(train);
  const bool one_ok = SameBlock(c.network().spec.label_block, start_net.spec.label_block) &&
                      !SameBlock(c.network().spec.task_block, start_net.spec.task_block);
  const double s = std::chrono::duration<double>(Clock::now() - start).count();
  Report(4, zero_ok && one_ok && s < 60.0,
         std::string("gamma=0 ") + (zero_ok ? "bit-identical" : "DIFFERS") +
             ", gamma=1 label block " + (one_ok ? "unchanged" : "CHANGED"),
         start);
}

std::vector<SampleData> FixtureSplit(const fs::path& root, Split split, std::size_t limit,
                                     std::size_t t_steps) {
  return LoadSamples(load_dataset(root, split, limit, 3), t_steps, 1000);
}

void Criterion8(const fs::path& work) {
  const auto start = Clock::now();
  const fs::path root = work / "chance";
  FixtureOptions opts;
  opts.train_per_digit = 0;
  opts.test_per_digit = 50;
  opts.seed = 8;
  if (!fs::exists(root / kManifestName)) GenerateFixtures(root, opts);
  const auto test = FixtureSplit(root, Split::kTest, 500, 100);
  CliConfig cli;
  cli.Set("profile", "desk", Source::kFlag);
  const TrainConfig cfg = cli.train_config();
  bool ok = test.size() >= 500;
  std::string detail = std::to_string(test.size()) + " samples;";
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Network net = build_mtsnn(cli.architecture(), seed);
    const double a1 = 100.0 * evaluate(net, test, 1, cfg);
    const double a2 = 100.0 * evaluate(net, test, 2, cfg);
    ok &= std::abs(a1 - 10.0) <= 5.0 && std::abs(a2 - 50.0) <= 10.0;
    detail += Fmt(" seed %.0f: %.1f%%/%.1f%%", static_cast<double>(seed), a1, a2);
  }
  Report(8, ok, detail, start);
}

std::string ReadAll(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int Run(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return rc == -1 ? -1 : WEXITSTATUS(rc);
}

void Criterion9(const fs::path& work, const std::string& cli) {
  const auto start = Clock::now();
  if (cli.empty()) {
    Report(9, false, "no --cli path given", start);
    return;
  }
  const fs::path root = work / "e2e_data";
  const std::string q = "'";
  bool ok = Run(q + cli + q + " -q gen-fixtures --root " + q + root.string() + q +
                " --train-per-digit 3 --test-per-digit 2") == 0;
  const fs::path first = work / "run_a";
  ok = ok && Run(q + cli + q + " -q train --profile desk --data-root " + q + root.string() + q +
                 " --t-steps 30 --feature-sizes 32 --label-hidden 16 --task-hidden 8"
                 " --epochs 2 --batch-size 8 --gamma 0.2 --seed 5 --eval-every 1 --out-dir " +
                 q + first.string() + q + " > /dev/null") == 0;
  const fs::path second = work / "run_b";
  ok = ok && Run(q + cli + q + " -q train --config " + q + (first / "config.resolved").string() +
                 q + " --out-dir " + q + second.string() + q + " > /dev/null") == 0;
  std::string detail = "CLI runs " + std::string(ok ? "succeeded" : "FAILED");
  if (ok) {
    const std::string m1 = ReadAll(first / "metrics.csv");
    const std::string c1 = ReadAll(first / "model.ckpt");
    const bool same_metrics = !m1.empty() && m1 == ReadAll(second / "metrics.csv");
    const bool same_ckpt = !c1.empty() && c1 == ReadAll(second / "model.ckpt");
    ok = same_metrics && same_ckpt;
    detail = std::string("metrics.csv ") + (same_metrics ? "identical" : "DIFFER") +
             ", model.ckpt " + (same_ckpt ? "identical" : "DIFFER");
  }
  Report(9, ok, detail, start);
}

struct DeskRun {
  double value = 0.0;
  std::uint64_t seed = 0;
  TrainOutcome outcome;
};

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void RunDesk(const fs::path& work, std::size_t jobs) {
  const auto start = Clock::now();
  const fs::path root = work / "desk_data";
  if (!fs::exists(root / kManifestName)) GenerateFixtures(root, FixtureOptions{});
  CliConfig cli;
  cli.Set("profile", "desk", Source::kFlag);
  cli.Set("jobs", std::to_string(jobs), Source::kFlag);
  cli.Validate();
  const DataSettings ds = cli.data_settings();
  ExperimentData data;
  data.train = LoadSamples(load_dataset(root, Split::kTrain, ds.train_limit, ds.seed),
                           ds.t_steps, ds.bin_width_us);
  data.test = LoadSamples(load_dataset(root, Split::kTest, ds.test_limit, ds.seed),
                          ds.t_steps, ds.bin_width_us);
  std::printf("desk data: %zu train / %zu test, T=%zu\n", data.train.size(), data.test.size(),
              ds.t_steps);
  const Architecture arch = cli.architecture();
  const TrainConfig base = cli.train_config();
  const std::vector<std::uint64_t> seeds = {0, 1, 2};

  std::vector<ResultRow> rows;
  auto log_row = [&](const std::string& family, double value, std::uint64_t seed,
                     const TrainOutcome& o, const TrainConfig& cfg) {
    ResultRow r;
    r.family = family;
    r.value = value;
    r.seed = seed;
    r.task1_acc = 100.0 * o.task1_acc;
    r.task2_acc = 100.0 * o.task2_acc;
    r.phi1 = cfg.phi1;
    r.phi2 = cfg.phi2;
    r.gamma = cfg.gamma;
    if (cfg.control_mode == ControlMode::kExternalCurrent) r.i_ext2 = cfg.i_ext2;
    r.epochs = cfg.epochs;
    r.t_steps = ds.t_steps;
    r.profile = "desk";
    r.wall_s = o.wall_s;
    const auto ref = ReferenceAccuracy(ParseFamily(family), value);
    r.ref_task1 = ref ? ref->first : NAN;
    r.ref_task2 = ref ? ref->second : NAN;
    rows.push_back(r);
    std::printf("  %s value=%g seed=%llu task1=%.2f task2=%.2f (%.0fs)\n", family.c_str(), value,
                static_cast<unsigned long long>(seed), r.task1_acc, r.task2_acc, o.wall_s);
    std::fflush(stdout);
  };

  // Threshold control at phi2 = 1.5 and 5.
  std::vector<DeskRun> thr;
  for (double phi2 : {1.5, 5.0}) {
    for (std::uint64_t seed : seeds) {
      TrainConfig cfg = base;
      cfg.phi2 = phi2;
      cfg.gamma = 0.0;
      cfg.use_task_block = false;
      cfg.seed = seed;
      DeskRun run{phi2, seed, TrainAndEvaluate(arch, cfg, data)};
      log_row("threshold", phi2, seed, run.outcome, cfg);
      thr.push_back(std::move(run));
    }
  }
  auto thr_mean = [&](double phi2, bool task1) {
    std::vector<double> v;
    for (const DeskRun& r : thr) {
      if (r.value == phi2) v.push_back(100.0 * (task1 ? r.outcome.task1_acc : r.outcome.task2_acc));
    }
    return Mean(v);
  };
  const double t1_low = thr_mean(1.5, true);
  const double t1_high = thr_mean(5.0, true);
  const double t2_high = thr_mean(5.0, false);

  // External-current control.
  std::vector<std::pair<double, double>> ec_means;
  std::string ec_task2;
  for (double i2 : {0.05, 0.1, 0.5, 1.0, 5.0}) {
    std::vector<double> acc, acc2;
    for (std::uint64_t seed : seeds) {
      TrainConfig cfg = base;
      cfg.control_mode = ControlMode::kExternalCurrent;
      cfg.i_ext2 = i2;
      cfg.phi2 = cfg.phi1;
      cfg.gamma = 0.0;
      cfg.use_task_block = false;
      cfg.seed = seed;
      const TrainOutcome o = TrainAndEvaluate(arch, cfg, data);
      log_row("extcurrent", i2, seed, o, cfg);
      acc.push_back(100.0 * o.task1_acc);
      acc2.push_back(100.0 * o.task2_acc);
    }
    ec_means.emplace_back(i2, Mean(acc));
    ec_task2 += Fmt(" %g:%.1f%%", i2, Mean(acc2));
  }

  for (const ResultRow& m : MeanRows(rows)) rows.push_back(m);
  std::ofstream(work / "desk_results.csv") << emit_table(rows, TableFormat::kCsv);
  std::ofstream(work / "desk_results.md") << emit_table(rows, TableFormat::kMarkdown);

  Report(5, t1_high > t1_low,
         Fmt("mean task-1 accuracy %.2f%% at phi2=5 vs %.2f%% at phi2=1.5", t1_high, t1_low),
         start);

  double best_ec = -1.0, best_i = 0.0;
  for (const auto& [i2, acc] : ec_means) {
    if (acc > best_ec) {
      best_ec = acc;
      best_i = i2;
    }
  }
  Report(6, best_ec <= t1_high,
         Fmt("best external-current task-1 %.2f%% (I_ext2=%g) vs threshold %.2f%%", best_ec,
             best_i, t1_high) +
             "; external-current task-2 means" + ec_task2,
         start);

  // Gating on the phi2 = 5 networks: swapping the control signal must hurt.
  bool gated = true;
  std::string detail;
  for (const DeskRun& r : thr) {
    if (r.value != 5.0) continue;
    const TrainConfig& cfg = r.outcome.config;
    ForwardOptions phi1, phi2;
    phi1.threshold = cfg.phi1;
    phi2.threshold = cfg.phi2;
    const double t1_own = EvaluateWith(r.outcome.network, data.test, 1, phi1, jobs);
    const double t1_swap = EvaluateWith(r.outcome.network, data.test, 1, phi2, jobs);
    const double t2_own = EvaluateWith(r.outcome.network, data.test, 2, phi2, jobs);
    const double t2_swap = EvaluateWith(r.outcome.network, data.test, 2, phi1, jobs);
    gated &= t1_swap < t1_own && t2_swap < t2_own;
    detail += Fmt("seed %.0f: task1 %.1f%%->%.1f%%, ", static_cast<double>(r.seed),
                  100 * t1_own, 100 * t1_swap) +
              Fmt("task2 %.1f%%->%.1f%%; ", 100 * t2_own, 100 * t2_swap);
  }
  Report(7, gated, detail, start);

  Report(10, t1_high >= 80.0 && t2_high >= 90.0,
         Fmt("phi2=5 mean test accuracy task1 %.2f%% (>= 80), task2 %.2f%% (>= 90)", t1_high,
             t2_high),
         start);
}

}  // namespace

int main(int argc, char** argv) {
  bool fast = false, desk = false;
  std::string cli;
  fs::path work = fs::temp_directory_path() / ("mtsnn_acceptance_" + std::to_string(getpid()));
  std::size_t jobs = 1;
  for (int k = 1; k < argc; ++k) {
    const std::string arg = argv[k];
    if (arg == "--fast") {
      fast = true;
    } else if (arg == "--desk") {
      desk = true;
    } else if (arg == "--cli" && k + 1 < argc) {
      cli = argv[++k];
    } else if (arg == "--work" && k + 1 < argc) {
      work = argv[++k];
    } else if (arg == "--jobs" && k + 1 < argc) {
      jobs = static_cast<std::size_t>(std::stoul(argv[++k]));
    } else {
      std::fprintf(stderr, "usage: %s [--fast] [--desk] [--cli PATH] [--work DIR] [--jobs N]\n",
                   argv[0]);
      return 1;
    }
  }
  if (!fast && !desk) fast = desk = true;
  fs::create_directories(work);
  try {
    if (fast) {
      Criterion1();
      Criterion2();
      Criterion3();
      Criterion4();
      Criterion8(work);
      Criterion9(work, cli);
    }
    if (desk) RunDesk(work, jobs);
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 2;
  }
  return g_failures == 0 ? 0 : 1;
}
