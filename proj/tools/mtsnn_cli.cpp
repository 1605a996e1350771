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

// mtsnn command-line tool. Links only the C API.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mtsnn/mtsnn.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;

struct Handles {
  mtsnn_config* cfg = nullptr;
  mtsnn_dataset* ds = nullptr;
  mtsnn_network* net = nullptr;
  ~Handles() {
    mtsnn_network_destroy(net);
    mtsnn_dataset_destroy(ds);
    mtsnn_config_destroy(cfg);
  }
};

int Report(mtsnn_status status) {
  if (status != MTSNN_OK) mtsnn_log(MTSNN_LOG_ERROR, mtsnn_last_error());
  return static_cast<int>(status);
}

#define TRY(expr)                                \
  do {                                           \
    const mtsnn_status s_ = (expr);              \
    if (s_ != MTSNN_OK) return Report(s_);       \
  } while (0)

std::string ConfigValue(const mtsnn_config* cfg, const char* key) {
  std::size_t needed = 0;
  mtsnn_config_get(cfg, key, nullptr, 0, &needed);
  std::string value(needed, '\0');
  mtsnn_config_get(cfg, key, value.data(), value.size(), nullptr);
  value.resize(needed > 0 ? needed - 1 : 0);
  return value;
}

std::string Kebab(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return key;
}

// --config FILE plus one --kebab-case flag per configuration key.
struct ConfigOptions {
  std::string config_file;
  std::map<std::string, std::string> values;

  void Attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "key = value configuration file")
        ->check(CLI::ExistingFile);
    for (std::size_t k = 0; k < mtsnn_config_key_count(); ++k) {
      const std::string key = mtsnn_config_key_name(k);
      cmd->add_option("--" + Kebab(key), values[key], mtsnn_config_key_help(k))
          ->group("Configuration");
    }
  }

  // File first, then flags, so flags win.
  int Resolve(CLI::App* cmd, mtsnn_config** out) const {
    TRY(mtsnn_config_create(out));
    if (!config_file.empty()) TRY(mtsnn_config_load_file(*out, config_file.c_str()));
    for (const auto& [key, value] : values) {
      if (cmd->count("--" + Kebab(key)) == 0) continue;
      TRY(mtsnn_config_set(*out, key.c_str(), value.c_str(), MTSNN_SOURCE_FLAG));
    }
    return kExitOk;
  }
};

void PrintStatus(const char* path, const char* status, void*) {
  std::printf("%s %s\n", status, path);
  std::fflush(stdout);
}

int CmdFetchData(const std::string& root, bool verify_only, const std::string& train_url,
                 const std::string& test_url) {
  if (!verify_only) {
    if (train_url.empty() || test_url.empty()) {
      mtsnn_log(MTSNN_LOG_ERROR,
                "invalid-config: downloading needs --train-url and --test-url (the archive "
                "locations of the dataset release); use --verify-only to check an existing "
                "tree");
      return kExitValidation;
    }
    mtsnn_log(MTSNN_LOG_INFO, ("fetching dataset into " + root).c_str());
    TRY(mtsnn_data_fetch(root.c_str(), train_url.c_str(), test_url.c_str(), PrintStatus,
                         nullptr));
  }
  std::size_t checked = 0;
  std::size_t failed = 0;
  const mtsnn_status s = mtsnn_data_verify(root.c_str(), PrintStatus, nullptr, &checked, &failed);
  std::printf("checked %zu file(s), %zu mismatch(es)\n", checked, failed);
  return Report(s);
}

int CmdGenFixtures(const std::string& root, std::size_t train_per_digit,
                   std::size_t test_per_digit, std::uint64_t seed, double distortion,
                   double noise) {
  std::size_t written = 0;
  TRY(mtsnn_fixtures_generate(root.c_str(), train_per_digit, test_per_digit, seed, distortion,
                              noise, &written));
  mtsnn_log(MTSNN_LOG_INFO,
            ("wrote " + std::to_string(written) + " event files under " + root).c_str());
  return kExitOk;
}

int CmdTrain(CLI::App* cmd, const ConfigOptions& opts) {
  Handles h;
  if (int rc = opts.Resolve(cmd, &h.cfg); rc != kExitOk) return rc;
  TRY(mtsnn_config_validate(h.cfg));
  const std::filesystem::path out = ConfigValue(h.cfg, "out_dir");
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  TRY(mtsnn_config_write(h.cfg, (out / "config.resolved").c_str()));
  TRY(mtsnn_dataset_open(h.cfg, MTSNN_SPLIT_TRAIN | MTSNN_SPLIT_TEST, &h.ds));
  double acc1 = 0.0;
  double acc2 = 0.0;
  TRY(mtsnn_train(h.cfg, h.ds, (out / "metrics.csv").c_str(), &h.net, &acc1, &acc2));
  TRY(mtsnn_network_save(h.net, (out / "model.ckpt").c_str()));
  std::printf("task1_acc=%.2f task2_acc=%.2f checkpoint=%s\n", acc1, acc2,
              (out / "model.ckpt").c_str());
  return kExitOk;
}

int CmdEval(CLI::App* cmd, const ConfigOptions& opts, const std::string& checkpoint, int task,
            const std::string& results) {
  if (task != 1 && task != 2) {
    mtsnn_log(MTSNN_LOG_ERROR,
              ("invalid-task: --task must be 1 or 2, got " + std::to_string(task)).c_str());
    return kExitValidation;
  }
  Handles h;
  if (int rc = opts.Resolve(cmd, &h.cfg); rc != kExitOk) return rc;
  TRY(mtsnn_config_validate(h.cfg));
  TRY(mtsnn_network_load(checkpoint.c_str(), &h.net));
  char digest[65] = {0};
  TRY(mtsnn_file_sha256(checkpoint.c_str(), digest));
  TRY(mtsnn_dataset_open(h.cfg, MTSNN_SPLIT_TEST, &h.ds));
  const std::string path =
      results.empty()
          ? (std::filesystem::path(ConfigValue(h.cfg, "out_dir")) / "eval_results.csv").string()
          : results;
  double acc = 0.0;
  TRY(mtsnn_evaluate(h.net, h.ds, h.cfg, task, path.c_str(), &acc));
  std::printf("task=%d accuracy=%.2f checkpoint_sha256=%s\n", task, acc, digest);
  return kExitOk;
}

int CmdSweep(CLI::App* cmd, const ConfigOptions& opts, const std::string& family) {
  Handles h;
  if (int rc = opts.Resolve(cmd, &h.cfg); rc != kExitOk) return rc;
  TRY(mtsnn_config_validate(h.cfg));
  const std::string out = ConfigValue(h.cfg, "out_dir");
  TRY(mtsnn_dataset_open(h.cfg, MTSNN_SPLIT_TRAIN | MTSNN_SPLIT_TEST, &h.ds));
  TRY(mtsnn_sweep(h.cfg, h.ds, family.c_str(), out.c_str()));
  std::printf("%s/%s_results.csv\n", out.c_str(), family.c_str());
  return kExitOk;
}

std::string DefaultDataRoot() {
  const char* env = std::getenv("MTSNN_DATA_ROOT");
  return env != nullptr && *env != '\0' ? env : "data";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-task spiking network training and experiments"};
  app.set_version_flag("--version", mtsnn_version());
  app.require_subcommand(1);
  app.fallthrough();
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");
  app.add_flag("-q,--quiet", quiet, "warnings and errors only");

  std::string root = DefaultDataRoot();
  bool verify_only = false;
  std::string train_url;
  std::string test_url;
  auto* fetch = app.add_subcommand("fetch-data", "download and/or verify the event dataset");
  fetch->add_option("--root", root, "dataset root (env MTSNN_DATA_ROOT)");
  fetch->add_flag("--verify-only", verify_only, "only check files against MANIFEST.sha256");
  fetch->add_option("--train-url", train_url, "URL of the training-split zip archive");
  fetch->add_option("--test-url", test_url, "URL of the test-split zip archive");

  std::size_t train_per_digit = 100;
  std::size_t test_per_digit = 50;
  std::uint64_t fixture_seed = 1;
  double distortion = 1.0;
  double noise = 0.5;
  auto* gen = app.add_subcommand("gen-fixtures", "write a synthetic dataset with the same layout");
  gen->add_option("--root", root, "output root (env MTSNN_DATA_ROOT)");
  gen->add_option("--train-per-digit", train_per_digit, "training files per digit");
  gen->add_option("--test-per-digit", test_per_digit, "test files per digit");
  gen->add_option("--seed", fixture_seed, "generator seed");
  gen->add_option("--distortion", distortion, "per-sample distortion scale")
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--noise", noise, "background events per ms")->check(CLI::NonNegativeNumber);

  ConfigOptions train_opts;
  auto* train = app.add_subcommand("train", "train one network; writes metrics, checkpoint, config");
  train_opts.Attach(train);

  ConfigOptions eval_opts;
  std::string checkpoint;
  int task = 0;
  std::string results;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on one task");
  eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  eval->add_option("--task", task, "task to evaluate (1 = digit, 2 = parity)")->required();
  eval->add_option("--results", results, "result CSV to append to (default <out-dir>/eval_results.csv)");
  eval_opts.Attach(eval);

  ConfigOptions sweep_opts;
  std::string family;
  auto* sweep = app.add_subcommand("sweep", "run an experiment family over --values and --seeds");
  sweep->add_option("family", family, "threshold | gamma | extcurrent | base")
      ->required()
      ->check(CLI::IsMember({"threshold", "gamma", "extcurrent", "base"}));
  sweep_opts.Attach(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  mtsnn_set_log_level(verbose ? MTSNN_LOG_DEBUG : quiet ? MTSNN_LOG_WARN : MTSNN_LOG_INFO);

  if (*fetch) return CmdFetchData(root, verify_only, train_url, test_url);
  if (*gen) {
    return CmdGenFixtures(root, train_per_digit, test_per_digit, fixture_seed, distortion,
                          noise);
  }
  if (*train) return CmdTrain(train, train_opts);
  if (*eval) return CmdEval(eval, eval_opts, checkpoint, task, results);
  return CmdSweep(sweep, sweep_opts, family);
}
