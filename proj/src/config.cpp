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
#include "mtsnn/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mtsnn/data.hpp"
#include "mtsnn/error.hpp"

namespace mtsnn {
namespace {

constexpr std::array<KeySpec, 41> kKeys = {{
    {"profile", "full", nullptr, "full | desk; selects the defaults marked (profile)"},
    {"data_root", "data", nullptr, "dataset root holding train/ and test/ (env MTSNN_DATA_ROOT)"},
    {"out_dir", "runs", nullptr, "output directory"},
    {"train_limit", nullptr, "1000", "class-balanced training subset size (profile)"},
    {"test_limit", nullptr, "500", "class-balanced test subset size (profile)"},
    {"data_seed", "3", nullptr, "seed for subset selection"},
    {"t_steps", "300", "100", "time steps per sample (profile)"},
    {"bin_width_us", "1000", nullptr, "bin width in microseconds"},
    {"feature_sizes", "512,512", "128,128", "feature block layer sizes (profile)"},
    {"label_hidden", "128", nullptr, "label block hidden sizes or none; output size is 10+2"},
    {"task_hidden", "128", nullptr, "task block hidden sizes or none; output size is 2"},
    {"recurrent", "false", nullptr, "add recurrent weights V to every layer"},
    {"tau_mem", "10", nullptr, "membrane time constant"},
    {"tau_syn", "5", nullptr, "synaptic time constant"},
    {"dt", "1", nullptr, "simulation step"},
    {"reset_mode", "subtract-spike", nullptr, "subtract-spike | subtract-threshold"},
    {"init_gain", "1.25", nullptr, "weights ~ U[-k,k], k = gain/sqrt(fan_in)"},
    {"phi1", "1.25", nullptr, "firing threshold for task 1"},
    {"phi2", "5", nullptr, "firing threshold for task 2"},
    {"gamma", "0", nullptr, "task-loss weight in (1-gamma)*L_y + gamma*L_t"},
    {"use_task_block", "auto", nullptr, "true | false | auto (auto: on iff gamma > 0)"},
    {"task_probability", "0.5", nullptr, "probability of drawing task 1 per batch"},
    {"control_mode", "threshold", nullptr, "threshold | extcurrent"},
    {"i_ext2", nullptr, nullptr, "external current for task 2 (extcurrent mode)"},
    {"epochs", "100", "15", "training epochs (profile)"},
    {"batch_size", "32", nullptr, "samples per batch"},
    {"lr", "0.001", nullptr, "learning rate"},
    {"optimizer", "adam", nullptr, "adam | sgd"},
    {"adam_beta1", "0.9", nullptr, "Adam first-moment decay"},
    {"adam_beta2", "0.999", nullptr, "Adam second-moment decay"},
    {"adam_epsilon", "1e-08", nullptr, "Adam epsilon"},
    {"surrogate", "exp-decay", nullptr, "exp-decay | fast-sigmoid"},
    {"surrogate_scale", "1", nullptr, "surrogate sharpness a"},
    {"detach_reset", "false", nullptr, "stop gradients through the reset term"},
    {"target_true_rate", "0.5", nullptr, "target spikes/step of the correct output"},
    {"target_false_rate", "0.05", nullptr, "target spikes/step of other outputs"},
    {"seed", "0", nullptr, "seed for weights, shuffling and task draws"},
    {"seeds", "1", "3", "seeds per sweep point (profile)"},
    {"values", nullptr, nullptr, "sweep values, comma separated"},
    {"eval_every", "0", nullptr, "evaluate on the test split every N epochs (0: end only)"},
    {"jobs", "1", nullptr, "worker threads"},
}};

const KeySpec* FindKey(const std::string& key) {
  for (const KeySpec& k : kKeys) {
    if (key == k.name) return &k;
  }
  return nullptr;
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void BadValue(const std::string& key, const std::string& value,
                           const std::string& why) {
  Fail(ErrorKind::kValidation, "invalid-config",
       "key '" + key + "' = '" + value + "': " + why);
}

double ParseDouble(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) BadValue(key, text, "not a number");
  return v;
}

}  // namespace

std::string SourceName(Source s) {
  switch (s) {
    case Source::kFile: return "file";
    case Source::kFlag: return "flag";
    case Source::kEnv: return "env";
    case Source::kDefault:
    default: return "default";
  }
}

std::span<const KeySpec> ConfigKeys() { return kKeys; }

std::string KebabCase(const std::string& key) {
  std::string out = key;
  std::replace(out.begin(), out.end(), '_', '-');
  return out;
}

std::vector<double> ParseValueList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    MTSNN_CHECK(!item.empty(), "invalid-config", "empty entry in value list '" + text + "'");
    out.push_back(ParseDouble("values", item));
  }
  return out;
}

CliConfig::CliConfig() {
  if (const char* env = std::getenv("MTSNN_DATA_ROOT"); env != nullptr && *env != '\0') {
    entries_["data_root"] = {std::string(env), Source::kEnv};
  }
}

void CliConfig::Set(const std::string& key, const std::string& value, Source source) {
  MTSNN_CHECK(FindKey(key) != nullptr, "unknown-key", "unknown configuration key '" + key + "'");
  const std::string v = Trim(value);
  entries_[key] = {v.empty() ? std::nullopt : std::optional<std::string>(v), source};
}

void CliConfig::LoadFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "unreadable-file", path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    MTSNN_CHECK(eq != std::string::npos, "invalid-config",
                path.string() + ":" + std::to_string(lineno) + ": expected 'key = value'");
    Set(Trim(line.substr(0, eq)), line.substr(eq + 1), Source::kFile);
  }
}

const std::string* CliConfig::Raw(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it != entries_.end()) return it->second.value ? &*it->second.value : nullptr;
  const KeySpec* spec = FindKey(key);
  MTSNN_CHECK(spec != nullptr, "unknown-key", "unknown configuration key '" + key + "'");
  thread_local std::string scratch;
  const char* dflt = spec->full_default;
  if (key != "profile" && profile() == "desk" && spec->desk_default != nullptr) {
    dflt = spec->desk_default;
  }
  if (dflt == nullptr) return nullptr;
  scratch = dflt;
  return &scratch;
}

std::optional<std::string> CliConfig::Get(const std::string& key) const {
  const std::string* v = Raw(key);
  return v ? std::optional<std::string>(*v) : std::nullopt;
}

Source CliConfig::SourceOf(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? Source::kDefault : it->second.source;
}

std::string CliConfig::profile() const {
  const auto it = entries_.find("profile");
  if (it != entries_.end() && it->second.value) return *it->second.value;
  return "full";
}

double CliConfig::Number(const std::string& key) const {
  const std::string* v = Raw(key);
  if (v == nullptr) BadValue(key, "", "value required");
  return ParseDouble(key, *v);
}

std::size_t CliConfig::Count(const std::string& key) const {
  const std::string* v = Raw(key);
  if (v == nullptr) BadValue(key, "", "value required");
  std::size_t n = 0;
  const auto* end = v->data() + v->size();
  const auto [ptr, ec] = std::from_chars(v->data(), end, n);
  if (ec != std::errc() || ptr != end) BadValue(key, *v, "not a non-negative integer");
  return n;
}

std::optional<std::size_t> CliConfig::OptionalCount(const std::string& key) const {
  if (Raw(key) == nullptr) return std::nullopt;
  return Count(key);
}

bool CliConfig::Flag(const std::string& key) const {
  const std::string* v = Raw(key);
  if (v == nullptr) BadValue(key, "", "value required");
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  BadValue(key, *v, "expected true or false");
}

std::vector<std::size_t> CliConfig::Sizes(const std::string& key) const {
  std::vector<std::size_t> out;
  const std::string* v = Raw(key);
  if (v == nullptr || Trim(*v) == "none") return out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (item.empty()) continue;
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), n);
    if (ec != std::errc() || ptr != item.data() + item.size() || n == 0) {
      BadValue(key, *v, "expected comma-separated positive sizes");
    }
    out.push_back(n);
  }
  return out;
}

TrainConfig CliConfig::train_config() const {
  TrainConfig c;
  c.phi1 = Number("phi1");
  c.phi2 = Number("phi2");
  c.gamma = Number("gamma");
  c.task_probability = Number("task_probability");
  c.epochs = Count("epochs");
  c.batch_size = Count("batch_size");
  c.lr = Number("lr");
  c.seed = Count("seed");
  const std::string mode = *Get("control_mode");
  if (mode == "threshold") {
    c.control_mode = ControlMode::kThreshold;
  } else if (mode == "extcurrent") {
    c.control_mode = ControlMode::kExternalCurrent;
  } else {
    BadValue("control_mode", mode, "expected threshold or extcurrent");
  }
  if (Raw("i_ext2") != nullptr) c.i_ext2 = Number("i_ext2");
  const std::string tb = *Get("use_task_block");
  c.use_task_block = tb == "auto" ? c.gamma > 0.0 : Flag("use_task_block");
  const std::string sg = *Get("surrogate");
  if (sg == "exp-decay") {
    c.surrogate.kind = SurrogateKind::kExpDecay;
  } else if (sg == "fast-sigmoid") {
    c.surrogate.kind = SurrogateKind::kFastSigmoid;
  } else {
    BadValue("surrogate", sg, "expected exp-decay or fast-sigmoid");
  }
  c.surrogate.scale = Number("surrogate_scale");
  c.target_rates = {Number("target_true_rate"), Number("target_false_rate")};
  const std::string opt = *Get("optimizer");
  if (opt == "adam") {
    c.optimizer = OptimizerKind::kAdam;
  } else if (opt == "sgd") {
    c.optimizer = OptimizerKind::kSgd;
  } else {
    BadValue("optimizer", opt, "expected adam or sgd");
  }
  c.adam_beta1 = Number("adam_beta1");
  c.adam_beta2 = Number("adam_beta2");
  c.adam_epsilon = Number("adam_epsilon");
  c.detach_reset = Flag("detach_reset");
  c.jobs = Count("jobs");
  return c;
}

Architecture CliConfig::architecture() const {
  Architecture a;
  a.input_size = kInputFeatures;
  a.feature_sizes = Sizes("feature_sizes");
  a.label_hidden = Sizes("label_hidden");
  a.task_hidden = Sizes("task_hidden");
  a.recurrent = Flag("recurrent");
  a.neuron.tau_mem = Number("tau_mem");
  a.neuron.tau_syn = Number("tau_syn");
  a.neuron.dt = Number("dt");
  a.neuron.threshold = Number("phi1");
  const std::string reset = *Get("reset_mode");
  if (reset == "subtract-spike") {
    a.neuron.reset_mode = ResetMode::kSubtractSpike;
  } else if (reset == "subtract-threshold") {
    a.neuron.reset_mode = ResetMode::kSubtractThreshold;
  } else {
    BadValue("reset_mode", reset, "expected subtract-spike or subtract-threshold");
  }
  a.init_gain = Number("init_gain");
  return a;
}

DataSettings CliConfig::data_settings() const {
  DataSettings d;
  d.root = *Get("data_root");
  d.train_limit = OptionalCount("train_limit");
  d.test_limit = OptionalCount("test_limit");
  d.t_steps = Count("t_steps");
  d.bin_width_us = static_cast<std::uint32_t>(Count("bin_width_us"));
  d.seed = Count("data_seed");
  return d;
}

std::size_t CliConfig::seeds() const { return Count("seeds"); }
std::size_t CliConfig::eval_every() const { return Count("eval_every"); }

std::vector<double> CliConfig::values() const {
  const std::string* v = Raw("values");
  return v ? ParseValueList(*v) : std::vector<double>{};
}

void CliConfig::Validate() const {
  const std::string p = profile();
  MTSNN_CHECK(p == "full" || p == "desk", "invalid-config",
              "key 'profile' = '" + p + "': expected full or desk");
  const TrainConfig tc = train_config();
  tc.Validate();
  const Architecture a = architecture();
  MTSNN_CHECK(a.init_gain > 0.0, "invalid-config", "key 'init_gain' must be positive");
  a.neuron.Validate();
  set_threshold(a.neuron, tc.phi2);
  const DataSettings d = data_settings();
  MTSNN_CHECK(d.t_steps >= 1, "invalid-config", "key 't_steps' must be >= 1");
  MTSNN_CHECK(d.bin_width_us >= 1, "invalid-config", "key 'bin_width_us' must be >= 1");
  MTSNN_CHECK(seeds() >= 1, "invalid-config", "key 'seeds' must be >= 1");
  eval_every();
  values();
}

std::string CliConfig::Serialize(const std::string& version) const {
  std::ostringstream out;
  out << "# mtsnn " << version << " resolved configuration\n";
  std::vector<std::string> keys;
  for (const KeySpec& k : kKeys) keys.emplace_back(k.name);
  std::sort(keys.begin(), keys.end());
  for (const std::string& key : keys) {
    const auto v = Get(key);
    out << key << " = " << v.value_or("") << "  # " << SourceName(SourceOf(key)) << "\n";
  }
  return out.str();
}

}  // namespace mtsnn
