// Copyright 2026 The CADD Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cadd/perturb/noise_assets.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "cadd/common/error.h"
#include "cadd/common/hash.h"
#include "cadd/common/random.h"
#include "cadd/perturb/perturb.h"

namespace cadd::perturb {

namespace {

constexpr double kPi = std::numbers::pi;

// One-pole low-pass; a in (0, 1], smaller is darker.
void LowPass(std::vector<double>& x, double a) {
  double y = 0.0;
  for (auto& v : x) {
    y += a * (v - y);
    v = y;
  }
}

void HighPass(std::vector<double>& x, double a) {
  std::vector<double> low = x;
  LowPass(low, a);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= low[i];
}

// Decaying filtered-noise burst added at `start`.
void AddBurst(std::vector<double>& x, Rng& rng, std::size_t start, double seconds, double amp, double decay,
              double tone) {
  const auto len = static_cast<std::size_t>(seconds * audio::kSampleRate);
  std::vector<double> b(len);
  for (auto& v : b) v = rng.Normal();
  LowPass(b, tone);
  for (std::size_t i = 0; i < len && start + i < x.size(); ++i) {
    const double t = static_cast<double>(i) / audio::kSampleRate;
    const double attack = std::min(1.0, t / 0.01);
    x[start + i] += amp * attack * std::exp(-t / decay) * b[i];
  }
}

void Normalize(std::vector<double>& x, double peak) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m > 0.0) {
    for (auto& v : x) v *= peak / m;
  }
}

}  // namespace

audio::Waveform SynthesizeNoise(const std::string& kind, double seconds, std::uint64_t seed) {
  if (!(seconds > 0.0)) throw ValidationError("noise duration must be positive");
  const auto n = static_cast<std::size_t>(seconds * audio::kSampleRate);
  Rng rng(Mix64(seed ^ Fnv1a64(kind)));
  std::vector<double> x(n, 0.0);
  const double sr = audio::kSampleRate;

  if (kind == "rain") {
    // Bright hiss plus dense droplet clicks.
    for (auto& v : x) v = 0.3 * rng.Normal();
    HighPass(x, 0.05);
    for (std::size_t d = 0; d < static_cast<std::size_t>(seconds * 60); ++d) {
      AddBurst(x, rng, rng.Index(n), 0.02, 1.0, 0.003, 0.9);
    }
  } else if (kind == "wind") {
    // Dark noise with slow gusting amplitude.
    for (auto& v : x) v = rng.Normal();
    LowPass(x, 0.01);
    LowPass(x, 0.02);
    const double f1 = 0.3 + 0.2 * rng.Uniform(), f2 = 0.9 + 0.3 * rng.Uniform();
    for (std::size_t i = 0; i < n; ++i) {
      const double t = i / sr;
      x[i] *= 0.6 + 0.3 * std::sin(2 * kPi * f1 * t) + 0.1 * std::sin(2 * kPi * f2 * t);
    }
  } else if (kind == "breathing") {
    // Band-limited noise under a ~0.4 Hz inhale/exhale envelope.
    for (auto& v : x) v = rng.Normal();
    LowPass(x, 0.15);
    HighPass(x, 0.02);
    for (std::size_t i = 0; i < n; ++i) {
      const double env = std::sin(kPi * std::fmod(i / sr * 0.4, 1.0));
      x[i] *= env * env;
    }
  } else if (kind == "clock_ticks") {
    // Short resonant clicks every half second.
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(0.5 * sr)) {
      for (std::size_t i = 0; i < static_cast<std::size_t>(0.015 * sr) && start + i < n; ++i) {
        const double t = i / sr;
        x[start + i] += std::exp(-t / 0.002) * std::sin(2 * kPi * 3000 * t);
      }
    }
    for (auto& v : x) v += 0.002 * rng.Normal();
  } else if (kind == "footsteps") {
    // Low thumps at walking pace.
    for (double t0 = 0.1; t0 < seconds; t0 += 0.55 + 0.05 * rng.Uniform()) {
      const auto start = static_cast<std::size_t>(t0 * sr);
      for (std::size_t i = 0; i < static_cast<std::size_t>(0.12 * sr) && start + i < n; ++i) {
        const double t = i / sr;
        x[start + i] += std::exp(-t / 0.03) * std::sin(2 * kPi * 90 * t);
      }
      AddBurst(x, rng, start, 0.05, 0.3, 0.01, 0.3);
    }
  } else if (kind == "sneezing") {
    // Inhale swell, then one sharp broadband burst.
    const auto mid = static_cast<std::size_t>(0.45 * n);
    for (std::size_t i = 0; i < mid; ++i) {
      const double r = static_cast<double>(i) / mid;
      x[i] = 0.15 * r * r * rng.Normal();
    }
    AddBurst(x, rng, mid, 0.35, 1.5, 0.08, 0.7);
  } else if (kind == "coughing") {
    // Two or three short low-mid bursts.
    const int coughs = 2 + static_cast<int>(rng.Index(2));
    for (int c = 0; c < coughs; ++c) {
      AddBurst(x, rng, static_cast<std::size_t>((0.1 + 0.3 * c) * n / 1.2), 0.25, 1.0, 0.05, 0.25);
    }
  } else {
    throw ValidationError("unknown noise kind: " + kind);
  }
  Normalize(x, 0.5);
  return {std::move(x), audio::kSampleRate};
}

void WriteNoiseAssets(const std::filesystem::path& dir, double seconds, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  for (const auto& kind : NoiseKinds()) audio::WriteWav(dir / (kind + ".wav"), SynthesizeNoise(kind, seconds, seed));
}

}  // namespace cadd::perturb
