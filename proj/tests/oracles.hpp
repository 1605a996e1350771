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

// Independent reference implementations used as test oracles. Nothing here
// calls into the library's numerical code paths.

#ifndef MTSNN_TESTS_ORACLES_HPP_
#define MTSNN_TESTS_ORACLES_HPP_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "mtsnn/error.hpp"
#include "mtsnn/graph.hpp"
#include "mtsnn/grad.hpp"
#include "mtsnn/train.hpp"

namespace mtsnn::testing {

// One neuron, straight loop over the recursion with zero initial state.
struct ScalarNeuron {
  double tau_mem = 10.0;
  double tau_syn = 5.0;
  double dt = 1.0;
  double phi = 1.25;
  double i_ext = 0.0;
  bool reset_by_threshold = false;
  double w = 1.0;  // feed-forward weight
  double v = 0.0;  // self-recurrent weight
  bool has_v = false;
};

struct ScalarTrace {
  std::vector<double> u, i, s;  // entry t = state index t + 1
};

inline ScalarTrace SimulateScalar(const ScalarNeuron& n, const std::vector<double>& x) {
  const double alpha = std::exp(-n.dt / n.tau_mem);
  const double beta = std::exp(-n.dt / n.tau_syn);
  const double r = n.reset_by_threshold ? n.phi : 1.0;
  double u = 0.0, i = 0.0, s = 0.0;
  ScalarTrace tr;
  for (double xt : x) {
    const double u_next = alpha * u + i - r * s;
    double drive = n.w * xt;
    if (n.has_v) drive += n.v * s;
    const double i_next = beta * i + drive + n.i_ext;
    const double s_next = u_next >= n.phi ? 1.0 : 0.0;
    u = u_next;
    i = i_next;
    s = s_next;
    tr.u.push_back(u);
    tr.i.push_back(i);
    tr.s.push_back(s);
  }
  return tr;
}

// Plain Adam on one scalar parameter.
inline double ScalarAdam(double w, const std::vector<double>& grads, double lr, double b1,
                         double b2, double eps) {
  double m = 0.0, v = 0.0;
  for (std::size_t t = 1; t <= grads.size(); ++t) {
    const double g = grads[t - 1];
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g * g;
    const double mh = m / (1.0 - std::pow(b1, static_cast<double>(t)));
    const double vh = v / (1.0 - std::pow(b2, static_cast<double>(t)));
    w -= lr * mh / (std::sqrt(vh) + eps);
  }
  return w;
}

// Dense random input with real values in [0, 1).
inline SpikeTrain RandomDenseInput(std::mt19937_64& gen, std::size_t width, std::size_t steps,
                                   double density = 1.0) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  SpikeTrain train(width);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t c = 0; c < width; ++c) {
      if (u01(gen) < density) train.Push(static_cast<std::uint32_t>(c), u01(gen));
    }
    train.EndStep();
  }
  return train;
}

inline SpikeTrain RandomBinaryInput(std::mt19937_64& gen, std::size_t width,
                                    std::size_t steps, double p) {
  std::bernoulli_distribution on(p);
  SpikeTrain train(width);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t c = 0; c < width; ++c) {
      if (on(gen)) train.Push(static_cast<std::uint32_t>(c), 1.0);
    }
    train.EndStep();
  }
  return train;
}

// Sum of squared rate errors, written out from the definition.
inline double RateLossOracle(const Matrix& out, const std::vector<double>& target) {
  double loss = 0.0;
  for (std::size_t k = 0; k < out.cols(); ++k) {
    double count = 0.0;
    for (std::size_t t = 0; t < out.rows(); ++t) count += out(t, k);
    loss += 0.5 * (count - target[k]) * (count - target[k]) / static_cast<double>(out.rows());
  }
  return loss;
}

// Error code thrown by fn, or "no-error".
template <typename Fn>
std::string ErrorCodeOf(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "no-error";
}

inline std::filesystem::path TempDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("mtsnn_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace mtsnn::testing

#endif  // MTSNN_TESTS_ORACLES_HPP_
