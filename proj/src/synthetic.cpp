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
#include "mtsnn/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "mtsnn/error.hpp"
#include "mtsnn/fetch.hpp"

namespace mtsnn {
namespace {

struct Point {
  double x;
  double y;
};
using Stroke = std::vector<Point>;

// Points on an ellipse, angles in degrees, y pointing down.
Stroke Arc(double cx, double cy, double rx, double ry, double a0, double a1,
           int n = 14) {
  Stroke s;
  for (int k = 0; k <= n; ++k) {
    const double a = (a0 + (a1 - a0) * k / n) * std::numbers::pi / 180.0;
    s.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
  }
  return s;
}

Stroke Concat(Stroke a, const Stroke& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// Glyph skeletons in a unit box.
std::vector<Stroke> Glyph(int digit) {
  switch (digit) {
    case 0: return {Arc(0.5, 0.5, 0.33, 0.45, 0, 360, 24)};
    case 1: return {{{0.32, 0.22}, {0.55, 0.05}, {0.55, 0.95}}};
    case 2:
      return {Concat(Arc(0.5, 0.3, 0.3, 0.25, 190, 380),
                     Stroke{{0.15, 0.95}, {0.87, 0.95}})};
    case 3:
      return {Concat(Arc(0.5, 0.28, 0.28, 0.23, 200, 450),
                     Arc(0.5, 0.73, 0.32, 0.22, 270, 520))};
    case 4: return {{{0.68, 0.95}, {0.68, 0.05}, {0.1, 0.66}, {0.9, 0.66}}};
    case 5:
      return {Concat(Stroke{{0.82, 0.05}, {0.27, 0.05}, {0.23, 0.46}},
                     Arc(0.5, 0.69, 0.3, 0.26, 220, 500))};
    case 6:
      return {Concat(Stroke{{0.75, 0.05}, {0.42, 0.28}, {0.21, 0.68}},
                     Arc(0.5, 0.72, 0.29, 0.23, 180, 540, 20))};
    case 7: return {{{0.13, 0.05}, {0.87, 0.05}, {0.42, 0.95}}};
    case 8:
      return {Arc(0.5, 0.27, 0.24, 0.22, 0, 360, 20),
              Arc(0.5, 0.72, 0.3, 0.24, 0, 360, 20)};
    case 9:
    default:
      return {Arc(0.5, 0.3, 0.3, 0.25, 0, 360, 20), {{0.8, 0.3}, {0.68, 0.95}}};
  }
}

// Intensity image on a supersampled grid covering [-kMargin, 34 + kMargin).
constexpr int kSuper = 4;
constexpr double kMargin = 6.0;
constexpr int kGrid = static_cast<int>((kSensorWidth + 2 * kMargin) * kSuper);

struct Image {
  std::vector<double> v = std::vector<double>(kGrid * kGrid, 0.0);

  double Sample(double x, double y) const {
    const double gx = (x + kMargin) * kSuper - 0.5;
    const double gy = (y + kMargin) * kSuper - 0.5;
    const int x0 = static_cast<int>(std::floor(gx));
    const int y0 = static_cast<int>(std::floor(gy));
    if (x0 < 0 || y0 < 0 || x0 + 1 >= kGrid || y0 + 1 >= kGrid) return 0.0;
    const double fx = gx - x0;
    const double fy = gy - y0;
    const double* r0 = v.data() + y0 * kGrid + x0;
    const double* r1 = r0 + kGrid;
    return (1 - fy) * ((1 - fx) * r0[0] + fx * r0[1]) + fy * ((1 - fx) * r1[0] + fx * r1[1]);
  }
};

double SegmentDistance(Point p, Point a, Point b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = p.x - (a.x + t * dx);
  const double ey = p.y - (a.y + t * dy);
  return std::sqrt(ex * ex + ey * ey);
}

Image Render(int digit, const FixtureOptions& options, Rng& rng) {
  const double k = options.distortion;
  const double height = 22.0 * (1.0 + k * rng.Uniform(-0.12, 0.12));
  const double width = 16.0 * (1.0 + k * rng.Uniform(-0.15, 0.15));
  const double angle = k * rng.Uniform(-0.2, 0.2);
  const double slant = k * rng.Uniform(-0.25, 0.25);
  const double cx = 17.0 + k * rng.Uniform(-2.0, 2.0);
  const double cy = 17.0 + k * rng.Uniform(-2.0, 2.0);
  const double thickness = 1.3 + rng.Uniform(0.0, 1.0);
  // Low-frequency elastic warp in glyph coordinates.
  std::array<double, 8> warp;
  for (double& w : warp) w = rng.Uniform(0.0, 2.0 * std::numbers::pi);
  const double amp = 0.06 * k;

  auto place = [&](Point p) {
    const double wx = p.x + amp * std::sin(2.5 * p.y + warp[0]) * std::cos(1.7 * p.x + warp[1]);
    const double wy = p.y + amp * std::sin(2.3 * p.x + warp[2]) * std::cos(1.9 * p.y + warp[3]);
    double x = (wx - 0.5) * width;
    const double y = (wy - 0.5) * height;
    x -= slant * y;
    const double c = std::cos(angle), s = std::sin(angle);
    return Point{cx + c * x - s * y, cy + s * x + c * y};
  };

  std::vector<Stroke> strokes = Glyph(digit);
  for (Stroke& stroke : strokes) {
    for (Point& p : stroke) {
      p.x += k * 0.015 * rng.Normal();
      p.y += k * 0.015 * rng.Normal();
      p = place(p);
    }
  }

  Image img;
  std::vector<double> dist(kGrid * kGrid, 1e9);
  const double reach = thickness / 2 + 1.5;
  for (const Stroke& stroke : strokes) {
    for (std::size_t s = 0; s + 1 < stroke.size(); ++s) {
      const Point a = stroke[s], b = stroke[s + 1];
      const int gx0 = std::max(0, static_cast<int>((std::min(a.x, b.x) - reach + kMargin) * kSuper));
      const int gx1 = std::min(kGrid - 1, static_cast<int>((std::max(a.x, b.x) + reach + kMargin) * kSuper) + 1);
      const int gy0 = std::max(0, static_cast<int>((std::min(a.y, b.y) - reach + kMargin) * kSuper));
      const int gy1 = std::min(kGrid - 1, static_cast<int>((std::max(a.y, b.y) + reach + kMargin) * kSuper) + 1);
      for (int gy = gy0; gy <= gy1; ++gy) {
        for (int gx = gx0; gx <= gx1; ++gx) {
          const Point p{(gx + 0.5) / kSuper - kMargin, (gy + 0.5) / kSuper - kMargin};
          double& d = dist[gy * kGrid + gx];
          d = std::min(d, SegmentDistance(p, a, b));
        }
      }
    }
  }
  for (std::size_t k2 = 0; k2 < dist.size(); ++k2) {
    img.v[k2] = std::clamp(1.0 - (dist[k2] - thickness / 2), 0.0, 1.0);
  }
  return img;
}

// Sensor displacement along the three-saccade triangle, in pixels.
Point SaccadeOffset(double t_ms) {
  static constexpr std::array<Point, 4> kCorners = {
      Point{0.0, 0.0}, Point{1.6, 3.0}, Point{3.2, 0.0}, Point{0.0, 0.0}};
  const double phase = std::fmod(t_ms / 100.0, 3.0);
  const int leg = std::min(2, static_cast<int>(phase));
  const double f = 0.5 - 0.5 * std::cos(std::numbers::pi * (phase - leg));
  const Point a = kCorners[leg], b = kCorners[leg + 1];
  return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
}

}  // namespace

std::vector<Event> SynthesizeDigit(int digit, const FixtureOptions& options, Rng& rng) {
  derive_labels(digit);
  const Image img = Render(digit, options, rng);
  constexpr int kPixels = kSensorWidth * kSensorHeight;
  auto log_intensity = [](double v) { return std::log(0.15 + v); };

  std::vector<double> reference(kPixels);
  std::vector<double> step(kPixels);
  for (int p = 0; p < kPixels; ++p) {
    step[p] = options.contrast_step * std::clamp(1.0 + 0.1 * rng.Normal(), 0.6, 1.4);
    reference[p] = log_intensity(img.Sample(p % kSensorWidth + 0.5, p / kSensorWidth + 0.5));
  }

  std::vector<Event> events;
  const std::uint32_t duration_ms = options.duration_us / 1000;
  for (std::uint32_t ms = 1; ms <= duration_ms; ++ms) {
    const Point off = SaccadeOffset(ms);
    const std::uint32_t base = (ms - 1) * 1000;
    for (int p = 0; p < kPixels; ++p) {
      const int x = p % kSensorWidth, y = p / kSensorWidth;
      const double l = log_intensity(img.Sample(x + 0.5 - off.x, y + 0.5 - off.y));
      while (l - reference[p] >= step[p]) {
        reference[p] += step[p];
        events.push_back({static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y), 1,
                          base + static_cast<std::uint32_t>(rng.Below(1000))});
      }
      while (reference[p] - l >= step[p]) {
        reference[p] -= step[p];
        events.push_back({static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y), 0,
                          base + static_cast<std::uint32_t>(rng.Below(1000))});
      }
    }
    double noise = options.noise_events_per_ms;
    while (noise > 0.0) {
      if (noise >= 1.0 || rng.Bernoulli(noise)) {
        events.push_back({static_cast<std::uint8_t>(rng.Below(kSensorWidth)),
                          static_cast<std::uint8_t>(rng.Below(kSensorHeight)),
                          static_cast<std::uint8_t>(rng.Below(2)),
                          base + static_cast<std::uint32_t>(rng.Below(1000))});
      }
      noise -= 1.0;
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.t_us < b.t_us; });
  return events;
}

std::size_t GenerateFixtures(const std::filesystem::path& root,
                             const FixtureOptions& options) {
  MTSNN_CHECK(options.duration_us >= 1000 && options.duration_us <= kMaxTimestampUs,
              "invalid-config", "fixture duration must be within 1 ms .. 2^23 us");
  MTSNN_CHECK(options.contrast_step > 0.0 && options.distortion >= 0.0 &&
                  options.noise_events_per_ms >= 0.0,
              "invalid-config", "fixture options out of range");
  std::size_t written = 0;
  for (Split split : {Split::kTrain, Split::kTest}) {
    const std::size_t count =
        split == Split::kTrain ? options.train_per_digit : options.test_per_digit;
    for (int d = 0; d < 10; ++d) {
      for (std::size_t k = 0; k < count; ++k) {
        const std::uint64_t salt =
            (split == Split::kTrain ? 0u : 1u) * 100000000ull + d * 1000000ull + k;
        Rng rng(DeriveSeed(options.seed, salt));
        const auto events = SynthesizeDigit(d, options, rng);
        char name[32];
        std::snprintf(name, sizeof(name), "%05zu.bin", k);
        WriteEventFile(root / SplitName(split) / std::to_string(d) / name, events);
        ++written;
      }
    }
  }
  WriteManifest(root);
  return written;
}

}  // namespace mtsnn
