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

#include "mtsnn/mtsnn.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <new>
#include <sstream>
#include <string>

#include "mtsnn/checkpoint.hpp"
#include "mtsnn/config.hpp"
#include "mtsnn/error.hpp"
#include "mtsnn/experiments.hpp"
#include "mtsnn/fetch.hpp"
#include "mtsnn/synthetic.hpp"

#ifndef MTSNN_VERSION_STRING
#define MTSNN_VERSION_STRING "0.0.0"
#endif

struct mtsnn_config {
  mtsnn::CliConfig impl;
};

struct mtsnn_network {
  mtsnn::Network impl;
};

struct mtsnn_dataset {
  mtsnn::ExperimentData data;
  std::size_t t_steps = 0;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_error_code;

std::mutex g_log_mutex;
mtsnn_log_fn g_log_fn = nullptr;
void* g_log_user = nullptr;
mtsnn_log_level g_log_level = MTSNN_LOG_INFO;

const char* LevelName(mtsnn_log_level level) {
  switch (level) {
    case MTSNN_LOG_DEBUG: return "debug";
    case MTSNN_LOG_INFO: return "info";
    case MTSNN_LOG_WARN: return "warn";
    case MTSNN_LOG_ERROR:
    default: return "error";
  }
}

void Log(mtsnn_log_level level, const std::string& message) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  if (level < g_log_level) return;
  if (g_log_fn != nullptr) {
    g_log_fn(level, message.c_str(), g_log_user);
    return;
  }
  const auto now = std::chrono::system_clock::now();
  const std::time_t secs = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%S", &tm);
  std::string escaped;
  for (char c : message) {
    if (c == '"' || c == '\\') escaped += '\\';
    escaped += c;
  }
  std::fprintf(stderr, "%s.%03dZ level=%s msg=\"%s\"\n", stamp, static_cast<int>(ms),
               LevelName(level), escaped.c_str());
}

mtsnn_status SetError(mtsnn_status status, const std::string& code, const std::string& msg) {
  g_error_code = code;
  g_error = code + ": " + msg;
  return status;
}

template <typename Fn>
mtsnn_status Guard(Fn&& fn) {
  g_error.clear();
  g_error_code.clear();
  try {
    fn();
    return MTSNN_OK;
  } catch (const mtsnn::Error& e) {
    g_error_code = e.code();
    g_error = e.what();
    return static_cast<mtsnn_status>(e.kind());
  } catch (const std::bad_alloc&) {
    return SetError(MTSNN_ERR_RUNTIME, "out-of-memory", "allocation failed");
  } catch (const std::filesystem::filesystem_error& e) {
    return SetError(MTSNN_ERR_IO, "io-error", e.what());
  } catch (const std::exception& e) {
    return SetError(MTSNN_ERR_RUNTIME, "internal-error", e.what());
  }
}

#define MTSNN_REQUIRE_ARG(ptr)                                                 \
  do {                                                                         \
    if ((ptr) == nullptr) {                                                    \
      return SetError(MTSNN_ERR_VALIDATION, "null-argument", #ptr " is NULL"); \
    }                                                                          \
  } while (0)

void WriteText(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) mtsnn::Fail(mtsnn::ErrorKind::kIo, "unwritable-file", path.string());
  out << text;
  out.close();
  if (!out) mtsnn::Fail(mtsnn::ErrorKind::kIo, "unwritable-file", path.string());
}

std::vector<std::uint64_t> SeedList(const mtsnn::CliConfig& cfg) {
  const std::uint64_t base = cfg.train_config().seed;
  std::vector<std::uint64_t> seeds;
  for (std::size_t k = 0; k < cfg.seeds(); ++k) seeds.push_back(base + k);
  return seeds;
}

std::string Fmt(const char* fmt, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), fmt, a, b);
  return buf;
}

}  // namespace

extern "C" {

const char* mtsnn_version(void) { return MTSNN_VERSION_STRING; }
const char* mtsnn_last_error(void) { return g_error.c_str(); }
const char* mtsnn_last_error_code(void) { return g_error_code.c_str(); }

void mtsnn_set_log_callback(mtsnn_log_fn fn, void* user) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  g_log_fn = fn;
  g_log_user = user;
}

void mtsnn_set_log_level(mtsnn_log_level min_level) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  g_log_level = min_level;
}

void mtsnn_log(mtsnn_log_level level, const char* message) {
  Log(level, message != nullptr ? message : "");
}

mtsnn_status mtsnn_config_create(mtsnn_config** out) {
  MTSNN_REQUIRE_ARG(out);
  return Guard([&] { *out = new mtsnn_config(); });
}

void mtsnn_config_destroy(mtsnn_config* cfg) { delete cfg; }

mtsnn_status mtsnn_config_set(mtsnn_config* cfg, const char* key, const char* value,
                              mtsnn_source source) {
  MTSNN_REQUIRE_ARG(cfg);
  MTSNN_REQUIRE_ARG(key);
  MTSNN_REQUIRE_ARG(value);
  return Guard([&] {
    cfg->impl.Set(key, value,
                  source == MTSNN_SOURCE_FILE ? mtsnn::Source::kFile : mtsnn::Source::kFlag);
  });
}

mtsnn_status mtsnn_config_load_file(mtsnn_config* cfg, const char* path) {
  MTSNN_REQUIRE_ARG(cfg);
  MTSNN_REQUIRE_ARG(path);
  return Guard([&] { cfg->impl.LoadFile(path); });
}

mtsnn_status mtsnn_config_get(const mtsnn_config* cfg, const char* key, char* buf,
                              size_t buf_len, size_t* needed) {
  MTSNN_REQUIRE_ARG(cfg);
  MTSNN_REQUIRE_ARG(key);
  return Guard([&] {
    const std::string value = cfg->impl.Get(key).value_or("");
    if (needed != nullptr) *needed = value.size() + 1;
    if (buf != nullptr && buf_len > 0) {
      const std::size_t n = std::min(buf_len - 1, value.size());
      std::memcpy(buf, value.data(), n);
      buf[n] = '\0';
    }
  });
}

mtsnn_status mtsnn_config_validate(const mtsnn_config* cfg) {
  MTSNN_REQUIRE_ARG(cfg);
  return Guard([&] { cfg->impl.Validate(); });
}

mtsnn_status mtsnn_config_write(const mtsnn_config* cfg, const char* path) {
  MTSNN_REQUIRE_ARG(cfg);
  MTSNN_REQUIRE_ARG(path);
  return Guard([&] { WriteText(path, cfg->impl.Serialize(MTSNN_VERSION_STRING)); });
}

size_t mtsnn_config_key_count(void) { return mtsnn::ConfigKeys().size(); }

const char* mtsnn_config_key_name(size_t index) {
  const auto keys = mtsnn::ConfigKeys();
  return index < keys.size() ? keys[index].name : nullptr;
}

const char* mtsnn_config_key_help(size_t index) {
  const auto keys = mtsnn::ConfigKeys();
  return index < keys.size() ? keys[index].help : nullptr;
}

mtsnn_status mtsnn_fixtures_generate(const char* root, size_t train_per_digit,
                                     size_t test_per_digit, uint64_t seed, double distortion,
                                     double noise_events_per_ms, size_t* files_written) {
  MTSNN_REQUIRE_ARG(root);
  return Guard([&] {
    MTSNN_CHECK(distortion >= 0.0 && noise_events_per_ms >= 0.0, "invalid-config",
                "fixture distortion and noise must be non-negative");
    mtsnn::FixtureOptions opts;
    opts.train_per_digit = train_per_digit;
    opts.test_per_digit = test_per_digit;
    opts.seed = seed;
    opts.distortion = distortion;
    opts.noise_events_per_ms = noise_events_per_ms;
    const std::size_t n = mtsnn::GenerateFixtures(root, opts);
    if (files_written != nullptr) *files_written = n;
  });
}

mtsnn_status mtsnn_data_verify(const char* root, mtsnn_file_status_fn fn, void* user,
                               size_t* checked, size_t* failed) {
  MTSNN_REQUIRE_ARG(root);
  return Guard([&] {
    mtsnn::StatusSink sink;
    if (fn != nullptr) {
      sink = [&](const std::string& path, const std::string& status) {
        fn(path.c_str(), status.c_str(), user);
      };
    }
    const mtsnn::VerifyReport report = mtsnn::VerifyTree(root, sink);
    if (checked != nullptr) *checked = report.checked;
    if (failed != nullptr) *failed = report.mismatched.size() + report.missing.size();
    if (!report.ok()) {
      const std::string first =
          report.mismatched.empty() ? report.missing.front() : report.mismatched.front();
      mtsnn::Fail(mtsnn::ErrorKind::kIo, "checksum-mismatch",
                  std::to_string(report.mismatched.size()) + " mismatched and " +
                      std::to_string(report.missing.size()) + " missing file(s), first: " +
                      first);
    }
  });
}

mtsnn_status mtsnn_data_fetch(const char* root, const char* train_url, const char* test_url,
                              mtsnn_file_status_fn fn, void* user) {
  MTSNN_REQUIRE_ARG(root);
  MTSNN_REQUIRE_ARG(train_url);
  MTSNN_REQUIRE_ARG(test_url);
  return Guard([&] {
    mtsnn::StatusSink sink;
    if (fn != nullptr) {
      sink = [&](const std::string& path, const std::string& status) {
        fn(path.c_str(), status.c_str(), user);
      };
    }
    mtsnn::FetchDataset(root, train_url, test_url, sink);
  });
}

mtsnn_status mtsnn_dataset_open(const mtsnn_config* cfg, int split_mask, mtsnn_dataset** out) {
  MTSNN_REQUIRE_ARG(cfg);
  MTSNN_REQUIRE_ARG(out);
  return Guard([&] {
    const mtsnn::DataSettings d = cfg->impl.data_settings();
    auto ds = std::make_unique<mtsnn_dataset>();
    ds->t_steps = d.t_steps;
    if (split_mask & MTSNN_SPLIT_TRAIN) {
      const auto index = mtsnn::load_dataset(d.root, mtsnn::Split::kTrain, d.train_limit, d.seed);
      MTSNN_CHECK(index.size() > 0, "empty-dataset", "no training samples under " + d.root.string());
      ds->data.train = mtsnn::LoadSamples(index, d.t_steps, d.bin_width_us);
    }
    if (split_mask & MTSNN_SPLIT_TEST) {
      const auto index = mtsnn::load_dataset(d.root, mtsnn::Split::kTest, d.test_limit, d.seed);
      MTSNN_CHECK(index.size() > 0, "empty-dataset", "no test samples under " + d.root.string());
      ds->data.test = mtsnn::LoadSamples(index, d.t_steps, d.bin_width_us);
    }
    Log(MTSNN_LOG_INFO, "loaded " + std::to_string(ds->data.train.size()) + " train / " +
                            std::to_string(ds->data.test.size()) + " test samples from " +
                            d.root.string());
    *out = ds.release();
  });
}

size_t mtsnn_dataset_size(const mtsnn_dataset* ds, int split) {
  if (ds == nullptr) return 0;
  return split == MTSNN_SPLIT_TRAIN ? ds->data.train.size() : ds->data.test.size();
}

void mtsnn_dataset_destroy(mtsnn_dataset* ds) { delete ds; }

mtsnn_status mtsnn_network_build(const mtsnn_config* cfg, mtsnn_network** out) {
  MTSNN_REQUIRE_ARG(cfg);
  MTSNN_REQUIRE_ARG(out);
  return Guard([&] {
    cfg->impl.Validate();
    const mtsnn::TrainConfig tc = cfg->impl.train_config();
    mtsnn::Architecture arch = cfg->impl.architecture();
    arch.num_tasks = tc.use_task_block ? 2 : 0;
    *out = new mtsnn_network{mtsnn::build_mtsnn(arch, tc.seed)};
  });
}

mtsnn_status mtsnn_network_load(const char* path, mtsnn_network** out) {
  MTSNN_REQUIRE_ARG(path);
  MTSNN_REQUIRE_ARG(out);
  return Guard([&] { *out = new mtsnn_network{mtsnn::LoadCheckpoint(path)}; });
}

mtsnn_status mtsnn_network_save(const mtsnn_network* net, const char* path) {
  MTSNN_REQUIRE_ARG(net);
  MTSNN_REQUIRE_ARG(path);
  return Guard([&] {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    mtsnn::SaveCheckpoint(p, net->impl);
  });
}

void mtsnn_network_destroy(mtsnn_network* net) { delete net; }

mtsnn_status mtsnn_train(const mtsnn_config* cfg, const mtsnn_dataset* ds,
                         const char* metrics_path, mtsnn_network** out_net, double* task1_acc,
                         double* task2_acc) {
  MTSNN_REQUIRE_ARG(cfg);
  MTSNN_REQUIRE_ARG(ds);
  return Guard([&] {
    cfg->impl.Validate();
    MTSNN_CHECK(!ds->data.train.empty() && !ds->data.test.empty(), "empty-dataset",
                "training needs both the train and test splits");
    const mtsnn::TrainConfig tc = cfg->impl.train_config();
    const std::size_t total = tc.epochs;
    mtsnn::TrainOutcome outcome = mtsnn::TrainAndEvaluate(
        cfg->impl.architecture(), tc, ds->data, cfg->impl.eval_every(),
        [&](const mtsnn::EpochMetrics& m) {
          std::ostringstream msg;
          msg << "epoch " << m.epoch << "/" << total << " loss " << m.mean_loss;
          for (int t = 0; t < 2; ++t) {
            if (m.task[t].samples > 0) {
              msg << " task" << t + 1 << "_train_acc " << m.task[t].accuracy;
            }
          }
          Log(MTSNN_LOG_INFO, msg.str());
        });
    Log(MTSNN_LOG_INFO, Fmt("test accuracy task1 %.2f%% task2 %.2f%%",
                            100.0 * outcome.task1_acc, 100.0 * outcome.task2_acc));
    if (metrics_path != nullptr) {
      std::ostringstream csv;
      outcome.metrics.WriteCsv(csv, tc);
      WriteText(metrics_path, csv.str());
    }
    if (task1_acc != nullptr) *task1_acc = 100.0 * outcome.task1_acc;
    if (task2_acc != nullptr) *task2_acc = 100.0 * outcome.task2_acc;
    if (out_net != nullptr) *out_net = new mtsnn_network{std::move(outcome.network)};
  });
}

mtsnn_status mtsnn_evaluate(const mtsnn_network* net, const mtsnn_dataset* ds,
                            const mtsnn_config* cfg, int task, const char* result_path,
                            double* accuracy) {
  MTSNN_REQUIRE_ARG(net);
  MTSNN_REQUIRE_ARG(ds);
  MTSNN_REQUIRE_ARG(cfg);
  return Guard([&] {
    MTSNN_CHECK(task == 1 || task == 2, "invalid-task",
                "task must be 1 or 2, got " + std::to_string(task));
    const mtsnn::TrainConfig tc = cfg->impl.train_config();
    tc.Validate();
    MTSNN_CHECK(!ds->data.test.empty(), "empty-dataset", "evaluation needs the test split");
    const mtsnn::Segment seg = mtsnn::TaskSegment(net->impl.spec, task);
    MTSNN_CHECK(seg.end > seg.begin, "invalid-task",
                "the network has no outputs for task " + std::to_string(task));
    const auto start = std::chrono::steady_clock::now();
    const double acc = 100.0 * mtsnn::EvaluateWith(net->impl, ds->data.test, task,
                                                   mtsnn::ControlFor(task, tc, false), tc.jobs);
    if (accuracy != nullptr) *accuracy = acc;
    if (result_path == nullptr) return;
    mtsnn::ResultRow row;
    row.family = "eval";
    row.value = task;
    row.seed = net->impl.seed;
    row.task1_acc = task == 1 ? acc : std::numeric_limits<double>::quiet_NaN();
    row.task2_acc = task == 2 ? acc : std::numeric_limits<double>::quiet_NaN();
    row.phi1 = tc.phi1;
    row.phi2 = tc.phi2;
    row.gamma = tc.gamma;
    if (tc.control_mode == mtsnn::ControlMode::kExternalCurrent) row.i_ext2 = tc.i_ext2;
    row.epochs = tc.epochs;
    row.t_steps = ds->t_steps;
    row.profile = cfg->impl.profile();
    row.wall_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    row.ref_task1 = std::numeric_limits<double>::quiet_NaN();
    row.ref_task2 = std::numeric_limits<double>::quiet_NaN();
    std::string table = mtsnn::emit_table({row}, mtsnn::TableFormat::kCsv);
    const std::filesystem::path p(result_path);
    const bool fresh = !std::filesystem::exists(p) || std::filesystem::file_size(p) == 0;
    if (!fresh) table.erase(0, table.find('\n') + 1);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::app);
    out << table;
    if (!out) mtsnn::Fail(mtsnn::ErrorKind::kIo, "unwritable-file", p.string());
  });
}

mtsnn_status mtsnn_sweep(const mtsnn_config* cfg, const mtsnn_dataset* ds, const char* family,
                         const char* out_dir) {
  MTSNN_REQUIRE_ARG(cfg);
  MTSNN_REQUIRE_ARG(ds);
  MTSNN_REQUIRE_ARG(family);
  MTSNN_REQUIRE_ARG(out_dir);
  return Guard([&] {
    cfg->impl.Validate();
    mtsnn::SweepSpec spec;
    spec.family = mtsnn::ParseFamily(family);
    spec.values = cfg->impl.values();
    if (spec.values.empty() && spec.family == mtsnn::SweepFamily::kBaseCase) {
      spec.values = {cfg->impl.train_config().phi1};
    }
    spec.base_config = cfg->impl.train_config();
    spec.architecture = cfg->impl.architecture();
    spec.profile = mtsnn::ParseProfile(cfg->impl.profile());
    spec.seeds = SeedList(cfg->impl);
    spec.t_steps = ds->t_steps;
    spec.eval_every = cfg->impl.eval_every();
    spec.Validate();
    MTSNN_CHECK(!ds->data.train.empty() && !ds->data.test.empty(), "empty-dataset",
                "sweeps need both the train and test splits");
    Log(MTSNN_LOG_INFO, "sweep " + std::string(family) + ": " +
                            std::to_string(spec.values.size()) + " value(s) x " +
                            std::to_string(spec.seeds.size()) + " seed(s)");
    const mtsnn::SweepResult result =
        mtsnn::RunSweep(spec, ds->data, [](const std::string& m) { Log(MTSNN_LOG_INFO, m); });
    const std::filesystem::path dir(out_dir);
    const std::string name = mtsnn::FamilyName(spec.family);
    WriteText(dir / (name + "_results.csv"),
              mtsnn::emit_table(result.rows, mtsnn::TableFormat::kCsv));
    WriteText(dir / (name + "_results.md"),
              mtsnn::emit_table(result.rows, mtsnn::TableFormat::kMarkdown));
    for (const mtsnn::RunCurve& c : result.curves) {
      const std::string file = mtsnn::CurveFileName(c.family, c.value, c.seed);
      WriteText(dir / file, mtsnn::RenderCurveSvg(c.metrics, file.substr(0, file.size() - 4)));
      std::ostringstream csv;
      c.metrics.WriteCsv(csv, c.config);
      WriteText(dir / (file.substr(0, file.size() - 4) + "_metrics.csv"), csv.str());
    }
    WriteText(dir / "config.resolved", cfg->impl.Serialize(MTSNN_VERSION_STRING));
    Log(MTSNN_LOG_INFO, "wrote " + (dir / (name + "_results.csv")).string());
  });
}

mtsnn_status mtsnn_file_sha256(const char* path, char* out) {
  MTSNN_REQUIRE_ARG(path);
  MTSNN_REQUIRE_ARG(out);
  return Guard([&] {
    const std::string hex = mtsnn::Sha256Hex(path);
    std::memcpy(out, hex.c_str(), hex.size() + 1);
  });
}

}  // extern "C"
