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

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "mtsnn/random.hpp"
#include "mtsnn/spike_train.hpp"

using namespace mtsnn;

TEST_CASE("rng streams are reproducible and seed-dependent") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int k = 0; k < 100; ++k) {
    const auto x = a.NextU64();
    CHECK(x == b.NextU64());
    differs |= x != c.NextU64();
  }
  CHECK(differs);
}

TEST_CASE("uniform and below stay in range") {
  Rng rng(1);
  double sum = 0.0;
  for (int k = 0; k < 20000; ++k) {
    const double u = rng.Uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    REQUIRE(rng.Below(7) < 7);
    const double r = rng.Uniform(-2.0, 3.0);
    REQUIRE(r >= -2.0);
    REQUIRE(r < 3.0);
  }
  CHECK(sum / 20000.0 == doctest::Approx(0.5).epsilon(0.02));
  CHECK(rng.Below(1) == 0);
  CHECK(rng.Below(0) == 0);
}

TEST_CASE("below is close to uniform") {
  Rng rng(9);
  std::vector<int> hist(10, 0);
  for (int k = 0; k < 100000; ++k) ++hist[rng.Below(10)];
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
}

TEST_CASE("normal has unit moments") {
  Rng rng(3);
  double s = 0.0, s2 = 0.0;
  const int n = 50000;
  for (int k = 0; k < n; ++k) {
    const double z = rng.Normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.02);
  CHECK(std::abs(s2 / n - 1.0) < 0.03);
}

TEST_CASE("shuffle is a permutation") {
  Rng rng(5);
  std::vector<int> v(100);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  rng.Shuffle(std::span<int>(w));
  CHECK(w != v);
  std::sort(w.begin(), w.end());
  CHECK(w == v);
}

TEST_CASE("derived seeds separate streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t base = 0; base < 50; ++base) {
    for (std::uint64_t salt : {0x1417ULL, 0xDA7AULL, 0x7A5CULL}) {
      seen.insert(DeriveSeed(base, salt));
    }
  }
  CHECK(seen.size() == 150);
  CHECK(DeriveSeed(7, 1) == DeriveSeed(7, 1));
}

TEST_CASE("spike train dense round trip") {
  const std::vector<double> dense = {0, 1, 0, 0.5,  //
                                     0, 0, 0, 0,    //
                                     1, 0, 0, 1};
  const SpikeTrain t = SpikeTrain::FromDense(dense, 4, 3);
  CHECK(t.width() == 4);
  CHECK(t.steps() == 3);
  CHECK(t.nnz() == 4);
  CHECK(t.indices(1).empty());
  CHECK(t.indices(2)[1] == 3);
  CHECK(t.values(0)[1] == 0.5);
  CHECK(t.Dense() == dense);
}
