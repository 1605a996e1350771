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

#include <cmath>
#include <limits>

#include "doctest.h"
#include "mtsnn/experiments.hpp"
#include "oracles.hpp"
#include "toy.hpp"

using namespace mtsnn;
using mtsnn::testing::ErrorCodeOf;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ResultRow Row(const std::string& family, double value, std::optional<std::uint64_t> seed,
              double t1, double t2) {
  ResultRow r;
  r.family = family;
  r.value = value;
  r.seed = seed;
  r.task1_acc = t1;
  r.task2_acc = t2;
  r.phi1 = 1.25;
  r.phi2 = value;
  r.epochs = 3;
  r.t_steps = 100;
  r.profile = "desk";
  r.wall_s = 1.5;
  r.ref_task1 = kNaN;
  r.ref_task2 = kNaN;
  return r;
}

SweepSpec ToySpec(SweepFamily family, std::vector<double> values) {
  SweepSpec s;
  s.family = family;
  s.values = std::move(values);
  s.architecture = testing::ToyArch(0);
  s.base_config.epochs = 2;
  s.base_config.batch_size = 10;
  s.base_config.lr = 0.01;
  s.seeds = {1, 2};
  s.t_steps = 12;
  s.profile = Profile::kDesk;
  return s;
}

bool SameResults(const std::vector<ResultRow>& a, const std::vector<ResultRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].family != b[k].family || a[k].value != b[k].value || a[k].seed != b[k].seed ||
        a[k].task1_acc != b[k].task1_acc || a[k].task2_acc != b[k].task2_acc) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("family and profile names") {
  for (auto f : {SweepFamily::kThreshold, SweepFamily::kGamma, SweepFamily::kExtCurrent,
                 SweepFamily::kBaseCase}) {
    CHECK(ParseFamily(FamilyName(f)) == f);
  }
  CHECK(ErrorCodeOf([] { ParseFamily("lr"); }) == "invalid-family");
  CHECK(ParseProfile("desk") == Profile::kDesk);
  CHECK(ErrorCodeOf([] { ParseProfile("huge"); }) == "invalid-config");
}

TEST_CASE("reference accuracies") {
  CHECK(ReferenceAccuracy(SweepFamily::kThreshold, 5.0)->first == 97.86);
  CHECK(ReferenceAccuracy(SweepFamily::kThreshold, 1.5)->second == 98.00);
  CHECK(ReferenceAccuracy(SweepFamily::kGamma, 0.3)->first == 97.59);
  CHECK(ReferenceAccuracy(SweepFamily::kExtCurrent, 5.0)->first == 92.20);
  CHECK(ReferenceAccuracy(SweepFamily::kBaseCase, 0.0)->first == 98.85);
  CHECK_FALSE(ReferenceAccuracy(SweepFamily::kThreshold, 4.0).has_value());
}

TEST_CASE("mean rows") {
  const std::vector<ResultRow> rows = {Row("threshold", 2, 0, 80, 90), Row("threshold", 2, 1, 90, 100),
                                       Row("threshold", 5, 0, 70, 60)};
  const auto means = MeanRows(rows);
  REQUIRE(means.size() == 2);
  CHECK_FALSE(means[0].seed.has_value());
  CHECK(means[0].value == 2);
  CHECK(means[0].task1_acc == doctest::Approx(85));
  CHECK(means[0].task2_acc == doctest::Approx(95));
  CHECK(means[0].wall_s == doctest::Approx(3.0));
  CHECK(means[1].task1_acc == 70);
}

TEST_CASE("table output") {
  CHECK(ErrorCodeOf([] { emit_table({}, TableFormat::kCsv); }) == "empty-rows");
  ResultRow r = Row("threshold", 5, 2, 97.5, 99.125);
  r.ref_task1 = 97.86;
  r.ref_task2 = 99.19;
  ResultRow m = Row("extcurrent", 0.5, std::nullopt, 90, kNaN);
  m.i_ext2 = 0.5;
  const std::string csv = emit_table({r, m}, TableFormat::kCsv);
  CHECK(csv ==
        "family,value,seed,task1_acc,task2_acc,phi1,phi2,gamma,i_ext2,epochs,t_steps,"
        "profile,wall_s,ref_task1,ref_task2\n"
        "threshold,5,2,97.50,99.12,1.25,5,0,,3,100,desk,1.500,97.86,99.19\n"
        "extcurrent,0.5,mean,90.00,,1.25,0.5,0,0.5,3,100,desk,1.500,,\n");
  const std::string md = emit_table({r, m}, TableFormat::kMarkdown);
  CHECK(md.find("| MT-SNN phi1=1.25 phi2=5 (seed 2) | 97.50 | 99.12 | 97.86 | 99.19 |") !=
        std::string::npos);
  CHECK(md.find("| MT-SNN-EC I_ext2=0.5 (mean) | 90.00 |  |  |  |") != std::string::npos);
}

TEST_CASE("curve files") {
  CHECK(CurveFileName("threshold", 1.5, 3) == "threshold_1.5_3.svg");
  CHECK(CurveFileName("extcurrent", 0.05, 0) == "extcurrent_0.05_0.svg");
  RunMetrics m;
  EpochMetrics e;
  for (std::size_t k = 1; k <= 3; ++k) {
    e.epoch = k;
    e.task[0] = {1.0 / static_cast<double>(k), 0.3 * static_cast<double>(k), 10};
    e.task[1] = {0.5, 0.5, 10};
    m.Append(e, "train");
  }
  const std::string svg = RenderCurveSvg(m, "demo <run>");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("demo &lt;run&gt;") != std::string::npos);
}

TEST_CASE("sweep validation") {
  SweepSpec s = ToySpec(SweepFamily::kGamma, {1.5});
  CHECK(ErrorCodeOf([&] { s.Validate(); }) == "invalid-config");
  s.values = {};
  CHECK(ErrorCodeOf([&] { s.Validate(); }) == "invalid-config");
  s = ToySpec(SweepFamily::kThreshold, {-1.0});
  CHECK(ErrorCodeOf([&] { s.Validate(); }) == "invalid-config");
  s = ToySpec(SweepFamily::kThreshold, {2.0});
  CHECK(ErrorCodeOf([&] { run_gamma_sweep(s, {}); }) == "invalid-config");
}

TEST_CASE("sweep points are independent of order and concurrency") {
  ExperimentData data{testing::ToyData(2, 12, 1), testing::ToyData(1, 12, 2)};
  SweepSpec a = ToySpec(SweepFamily::kThreshold, {3.0, 1.5});
  SweepSpec b = ToySpec(SweepFamily::kThreshold, {1.5, 3.0});
  b.seeds = {2, 1};
  b.base_config.jobs = 2;
  const SweepResult ra = run_threshold_sweep(a, data);
  const SweepResult rb = run_threshold_sweep(b, data);
  REQUIRE(ra.rows.size() == 6);
  CHECK(ra.rows[0].value == 1.5);
  CHECK(*ra.rows[0].seed == 1);
  CHECK(ra.rows[1].value == 1.5);
  CHECK(*ra.rows[1].seed == 2);
  CHECK_FALSE(ra.rows[4].seed.has_value());
  CHECK(ra.rows[0].phi2 == 1.5);
  CHECK(ra.rows[0].ref_task1 == 93.73);
  CHECK(ra.rows[2].ref_task1 == 96.60);
  CHECK(SameResults(ra.rows, rb.rows));
  CHECK(ra.curves.size() == 4);

  // A single point run on its own reproduces its row inside the sweep.
  SweepSpec c = ToySpec(SweepFamily::kThreshold, {3.0});
  c.seeds = {2};
  const SweepResult rc = run_threshold_sweep(c, data);
  CHECK(rc.rows[0].task1_acc == ra.rows[3].task1_acc);
  CHECK(rc.rows[0].task2_acc == ra.rows[3].task2_acc);
}

TEST_CASE("family-specific point settings") {
  ExperimentData data{testing::ToyData(1, 10, 3), testing::ToyData(1, 10, 4)};
  SweepSpec ec = ToySpec(SweepFamily::kExtCurrent, {0.5});
  ec.seeds = {0};
  ec.base_config.epochs = 1;
  const auto re = run_ext_current_sweep(ec, data);
  CHECK(re.rows[0].phi2 == re.rows[0].phi1);
  CHECK(*re.rows[0].i_ext2 == 0.5);
  CHECK(re.curves[0].config.control_mode == ControlMode::kExternalCurrent);

  SweepSpec g = ToySpec(SweepFamily::kGamma, {0.2});
  g.seeds = {0};
  g.base_config.epochs = 1;
  const auto rg = run_gamma_sweep(g, data);
  CHECK(rg.rows[0].gamma == 0.2);
  CHECK(rg.curves[0].config.use_task_block);

  SweepSpec base = ToySpec(SweepFamily::kBaseCase, {0.0});
  base.seeds = {0};
  base.base_config.epochs = 1;
  const auto rb = run_base_case(base, data);
  REQUIRE(rb.curves.size() == 2);
  CHECK(rb.curves[0].family == "base-task1");
  CHECK(rb.curves[1].family == "base-task2");
  CHECK(rb.rows[0].task1_acc >= 0.0);
  CHECK(rb.rows[0].task2_acc >= 0.0);
  for (const auto& row : rb.curves[0].metrics.rows) CHECK(row.task == 1);
  for (const auto& row : rb.curves[1].metrics.rows) CHECK(row.task == 2);
}

TEST_CASE("train and evaluate records test rows") {
  ExperimentData data{testing::ToyData(1, 10, 5), testing::ToyData(1, 10, 6)};
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.batch_size = 5;
  cfg.task_probability = 1.0;
  std::size_t seen = 0;
  const auto out = TrainAndEvaluate(testing::ToyArch(0), cfg, data, 2,
                                    [&](const EpochMetrics&) { ++seen; });
  CHECK(seen == 4);
  std::size_t test_rows = 0;
  for (const auto& r : out.metrics.rows) test_rows += r.split == "test";
  CHECK(test_rows == 4);  // epochs 2 and 4, both tasks
  CHECK(out.task1_acc >= 0.0);
  CHECK(out.network.spec.task_block.empty());
}
