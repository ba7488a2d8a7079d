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

#include "cadd/perturb/perturb.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <mutex>
#include <numbers>

#include "cadd/audio/fft.h"
#include "cadd/common/error.h"
#include "cadd/common/hash.h"
#include "cadd/common/process.h"
#include "cadd/common/random.h"

namespace cadd::perturb {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t NextPow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::string FormatValue(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double ParseNumber(std::string_view text, std::string_view name) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(text), &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("bad perturbation value in " + std::string(name));
  }
}

bool Contains(const std::vector<double>& grid, double v) {
  return std::any_of(grid.begin(), grid.end(), [v](double g) { return std::abs(g - v) < 1e-12; });
}

// Zero-phase filtering by a real per-bin gain; the zero padding keeps the
// circular wrap out of the kept samples.
template <typename GainFn>
std::vector<double> FilterByGain(std::span<const double> x, int rate, GainFn gain) {
  if (x.empty()) return {};
  const std::size_t n = NextPow2(2 * x.size());
  audio::RealFft fft(n);
  std::vector<double> padded(n, 0.0);
  std::copy(x.begin(), x.end(), padded.begin());
  auto spec = fft.Forward(padded);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    spec[k] *= gain(static_cast<double>(k) * rate / static_cast<double>(n));
  }
  const auto back = fft.Inverse(spec);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = back[i] / static_cast<double>(n);
  return y;
}

}  // namespace

std::string_view FamilyName(Family f) {
  switch (f) {
    case Family::kAirAbsorption:
      return "air_absorption";
    case Family::kBackgroundNoise:
      return "background_noise";
    case Family::kGaussianNoise:
      return "gaussian_noise";
    case Family::kMp3:
      return "mp3";
    case Family::kTimeStretch:
      return "time_stretch";
  }
  return "unknown";
}

Family ParseFamily(std::string_view text) {
  for (Family f : {Family::kAirAbsorption, Family::kBackgroundNoise, Family::kGaussianNoise, Family::kMp3,
                   Family::kTimeStretch}) {
    if (FamilyName(f) == text) return f;
  }
  throw ValidationError("unknown perturbation family: " + std::string(text));
}

const std::vector<double>& AirDistances() {
  static const std::vector<double> v{10, 20, 50, 100};
  return v;
}
const std::vector<std::string>& NoiseKinds() {
  static const std::vector<std::string> v{"rain", "wind", "breathing", "clock_ticks", "footsteps", "sneezing",
                                          "coughing"};
  return v;
}
const std::vector<double>& GaussianMaxFactors() {
  static const std::vector<double> v{0.05, 0.1, 0.15, 0.2};
  return v;
}
const std::vector<int>& Mp3Bitrates() {
  static const std::vector<int> v{8, 16, 32, 64};
  return v;
}
const std::vector<double>& StretchRates() {
  static const std::vector<double> v{0.6, 0.8, 1.2, 1.4};
  return v;
}

std::string Perturbation::Name() const {
  const std::string prefix(FamilyName(family));
  switch (family) {
    case Family::kAirAbsorption:
      return prefix + "_" + FormatValue(value) + "m";
    case Family::kBackgroundNoise:
      return prefix + "_" + kind;
    case Family::kMp3:
      return prefix + "_" + FormatValue(value) + "kbps";
    case Family::kGaussianNoise:
    case Family::kTimeStretch:
      return prefix + "_" + FormatValue(value);
  }
  return prefix;
}

Perturbation Perturbation::Parse(std::string_view name, std::uint64_t seed) {
  for (Family f : {Family::kAirAbsorption, Family::kBackgroundNoise, Family::kGaussianNoise, Family::kMp3,
                   Family::kTimeStretch}) {
    const std::string prefix = std::string(FamilyName(f)) + "_";
    if (name.substr(0, prefix.size()) != prefix) continue;
    std::string_view rest = name.substr(prefix.size());
    Perturbation p;
    p.family = f;
    p.seed = seed;
    if (f == Family::kBackgroundNoise) {
      p.kind = std::string(rest);
      if (std::find(NoiseKinds().begin(), NoiseKinds().end(), p.kind) == NoiseKinds().end()) {
        throw ValidationError("unknown background noise kind: " + p.kind);
      }
      return p;
    }
    if (f == Family::kAirAbsorption && rest.ends_with("m")) rest.remove_suffix(1);
    if (f == Family::kMp3 && rest.ends_with("kbps")) rest.remove_suffix(4);
    p.value = ParseNumber(rest, name);
    return p;
  }
  throw ValidationError("unknown perturbation: " + std::string(name));
}

bool Perturbation::InGrid() const {
  switch (family) {
    case Family::kAirAbsorption:
      return Contains(AirDistances(), value);
    case Family::kBackgroundNoise:
      return std::find(NoiseKinds().begin(), NoiseKinds().end(), kind) != NoiseKinds().end();
    case Family::kGaussianNoise:
      return Contains(GaussianMaxFactors(), value);
    case Family::kMp3:
      return std::any_of(Mp3Bitrates().begin(), Mp3Bitrates().end(), [this](int k) { return k == value; });
    case Family::kTimeStretch:
      return Contains(StretchRates(), value);
  }
  return false;
}

std::vector<Perturbation> Grid(std::uint64_t seed) {
  std::vector<Perturbation> g;
  for (double d : AirDistances()) g.push_back({Family::kAirAbsorption, d, "", seed});
  for (const auto& k : NoiseKinds()) g.push_back({Family::kBackgroundNoise, 0.0, k, seed});
  for (double x : GaussianMaxFactors()) g.push_back({Family::kGaussianNoise, x, "", seed});
  for (int b : Mp3Bitrates()) g.push_back({Family::kMp3, static_cast<double>(b), "", seed});
  for (double r : StretchRates()) g.push_back({Family::kTimeStretch, r, "", seed});
  return g;
}

FfmpegMp3Codec::FfmpegMp3Codec(std::string binary) : binary_(std::move(binary)) {
  if (!FindExecutable(binary_)) throw EnvironmentError("mp3 codec unavailable: " + binary_ + " not found on PATH");
}

audio::Waveform FfmpegMp3Codec::RoundTrip(const audio::Waveform& wave, int kbps) const {
  ScratchDir scratch;
  const auto in = scratch.path() / "in.wav";
  const auto mp3 = scratch.path() / "out.mp3";
  const auto out = scratch.path() / "out.wav";
  audio::WriteWav(in, wave);
  const std::vector<std::string> base{binary_, "-nostdin", "-y", "-loglevel", "error", "-i"};
  auto encode = base;
  encode.insert(encode.end(), {in.string(), "-codec:a", "libmp3lame", "-b:a", std::to_string(kbps) + "k",
                               mp3.string()});
  auto decode = base;
  decode.insert(decode.end(), {mp3.string(), "-ac", "1", "-ar", std::to_string(audio::kSampleRate), out.string()});
  if (RunProcess(encode) != 0 || RunProcess(decode) != 0) {
    throw EnvironmentError("mp3 round trip failed via " + binary_);
  }
  audio::Waveform y = audio::ReadWav(out);
  y.samples.resize(wave.size(), 0.0);
  return y;
}

double NullMp3Codec::CutoffHz(int kbps) { return std::min(audio::kSampleRate / 2.0, 2000.0 + 100.0 * kbps); }

int NullMp3Codec::QuantizerBits(int kbps) { return 4 + kbps / 8; }

audio::Waveform NullMp3Codec::RoundTrip(const audio::Waveform& wave, int kbps) const {
  if (kbps <= 0) throw ValidationError("mp3 bitrate must be positive");
  const double cutoff = CutoffHz(kbps);
  audio::Waveform y{FilterByGain(wave.samples, wave.rate, [cutoff](double f) { return f <= cutoff ? 1.0 : 0.0; }),
                    wave.rate};
  const double levels = std::ldexp(1.0, QuantizerBits(kbps) - 1);
  for (auto& s : y.samples) s = std::round(std::clamp(s, -1.0, 1.0) * levels) / levels;
  return y;
}

NoiseBank::NoiseBank(std::filesystem::path dir) : dir_(std::move(dir)) {}

const audio::Waveform& NoiseBank::Get(const std::string& kind) const {
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache_.find(kind);
  if (it != cache_.end()) return it->second;
  const auto path = dir_ / (kind + ".wav");
  if (!std::filesystem::exists(path)) throw EnvironmentError("missing noise asset: " + path.string());
  audio::Waveform w = audio::ReadWav(path);
  if (w.samples.empty() || audio::Rms(w.samples) == 0.0) throw EnvironmentError("silent noise asset: " + path.string());
  return cache_.emplace(kind, std::move(w)).first->second;
}

double AirAttenuationDbPerMetre(double f) {
  // ISO 9613-1 pure-tone absorption.
  const double t = 293.15, t0 = 293.15, t01 = 273.16, rh = 70.0, pa_pr = 1.0;
  const double c = -6.8346 * std::pow(t01 / t, 1.261) + 4.6151;
  const double h = rh * std::pow(10.0, c) / pa_pr;
  const double fr_o = pa_pr * (24.0 + 4.04e4 * h * (0.02 + h) / (0.391 + h));
  const double fr_n = pa_pr * std::pow(t / t0, -0.5) * (9.0 + 280.0 * h * std::exp(-4.170 * (std::pow(t / t0, -1.0 / 3.0) - 1.0)));
  const double f2 = f * f;
  return 8.686 * f2 *
         (1.84e-11 / pa_pr * std::sqrt(t / t0) +
          std::pow(t / t0, -2.5) * (0.01275 * std::exp(-2239.1 / t) / (fr_o + f2 / fr_o) +
                                    0.1068 * std::exp(-3352.0 / t) / (fr_n + f2 / fr_n)));
}

audio::Waveform AirAbsorption(const audio::Waveform& wave, double distance_m) {
  if (!(distance_m >= 0.0)) throw ValidationError("air absorption distance must be non-negative");
  return {FilterByGain(wave.samples, wave.rate,
                       [distance_m](double f) { return std::pow(10.0, -AirAttenuationDbPerMetre(f) * distance_m / 20.0); }),
          wave.rate};
}

audio::Waveform MixBackground(const audio::Waveform& wave, const audio::Waveform& noise, double snr_db) {
  if (noise.samples.empty()) throw ValidationError("background noise is empty");
  const double noise_rms = audio::Rms(noise.samples);
  if (noise_rms == 0.0) throw ValidationError("background noise is silent");
  const double gain = audio::Rms(wave.samples) / (noise_rms * std::pow(10.0, snr_db / 20.0));
  audio::Waveform y = wave;
  for (std::size_t i = 0; i < y.samples.size(); ++i) y.samples[i] += gain * noise.samples[i % noise.samples.size()];
  return y;
}

double GaussianFactor(double max_factor, std::uint64_t seed) {
  if (!(max_factor >= 0.001)) throw ValidationError("gaussian noise factor must be at least 0.001");
  Rng rng(Mix64(seed ^ 0x6a0551a9ULL));
  return rng.Uniform(0.001, max_factor);
}

audio::Waveform AddGaussianNoise(const audio::Waveform& wave, double factor, std::uint64_t seed) {
  if (!(factor >= 0.0)) throw ValidationError("gaussian noise factor must be non-negative");
  audio::Waveform y = wave;
  if (factor == 0.0 || wave.samples.empty()) return y;
  Rng rng(Mix64(seed));
  std::vector<double> n(wave.size());
  for (auto& v : n) v = factor * rng.Normal();
  double nx = 0.0, xx = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    nx += n[i] * wave.samples[i];
    xx += wave.samples[i] * wave.samples[i];
  }
  const double proj = xx > 0.0 ? nx / xx : 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) y.samples[i] += n[i] - proj * wave.samples[i];
  return y;
}

audio::Waveform TimeStretch(const audio::Waveform& wave, double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw ValidationError("time stretch rate must be positive");
  constexpr std::size_t kFft = 512, kHop = 128, kBins = kFft / 2 + 1;
  const std::size_t n = wave.size();
  const auto out_len = static_cast<std::size_t>(std::llround(static_cast<double>(n) / rate));
  if (n == 0) return {{}, wave.rate};

  std::vector<double> window(kFft);
  for (std::size_t i = 0; i < kFft; ++i) window[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / kFft);

  // Centre padding, then enough tail for whole frames.
  const std::size_t frames = 1 + (n + kHop - 1) / kHop;
  std::vector<double> padded(kFft + (frames - 1) * kHop, 0.0);
  std::copy(wave.samples.begin(), wave.samples.end(), padded.begin() + kFft / 2);

  audio::RealFft fft(kFft);
  std::vector<std::vector<std::complex<double>>> stft(frames + 1, std::vector<std::complex<double>>(kBins));
  std::vector<double> frame(kFft);
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t i = 0; i < kFft; ++i) frame[i] = padded[f * kHop + i] * window[i];
    stft[f] = fft.Forward(frame);
  }

  std::vector<double> advance(kBins);
  for (std::size_t k = 0; k < kBins; ++k) advance[k] = 2.0 * kPi * static_cast<double>(k * kHop) / kFft;
  std::vector<double> phase(kBins);
  for (std::size_t k = 0; k < kBins; ++k) phase[k] = std::arg(stft[0][k]);

  std::vector<double> steps;
  for (double t = 0.0; t < static_cast<double>(frames); t += rate) steps.push_back(t);
  const std::size_t total = kFft + (steps.size() - 1) * kHop;
  std::vector<double> out(total, 0.0), norm(total, 0.0);
  std::vector<std::complex<double>> bins(kBins);
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const auto i = static_cast<std::size_t>(steps[s]);
    const double alpha = steps[s] - static_cast<double>(i);
    for (std::size_t k = 0; k < kBins; ++k) {
      const double mag = (1.0 - alpha) * std::abs(stft[i][k]) + alpha * std::abs(stft[i + 1][k]);
      bins[k] = std::polar(mag, phase[k]);
      double dphi = std::arg(stft[i + 1][k]) - std::arg(stft[i][k]) - advance[k];
      dphi -= 2.0 * kPi * std::round(dphi / (2.0 * kPi));
      phase[k] += advance[k] + dphi;
    }
    const auto time = fft.Inverse(bins);
    for (std::size_t j = 0; j < kFft; ++j) {
      out[s * kHop + j] += time[j] / kFft * window[j];
      norm[s * kHop + j] += window[j] * window[j];
    }
  }
  audio::Waveform y;
  y.rate = wave.rate;
  y.samples.assign(out_len, 0.0);
  for (std::size_t i = 0; i < out_len && i + kFft / 2 < total; ++i) {
    const std::size_t j = i + kFft / 2;
    y.samples[i] = norm[j] > 1e-10 ? out[j] / norm[j] : 0.0;
  }
  return y;
}

audio::Waveform Apply(const Perturbation& p, const audio::Waveform& wave, const Environment& env) {
  switch (p.family) {
    case Family::kAirAbsorption:
      return AirAbsorption(wave, p.value);
    case Family::kBackgroundNoise:
      if (env.noise == nullptr) throw EnvironmentError("background noise needs a noise asset directory");
      return MixBackground(wave, env.noise->Get(p.kind), kBackgroundSnrDb);
    case Family::kGaussianNoise:
      return AddGaussianNoise(wave, GaussianFactor(p.value, p.seed), Mix64(p.seed + 1));
    case Family::kMp3:
      if (env.mp3 == nullptr) throw EnvironmentError("mp3 perturbation needs a codec");
      return env.mp3->RoundTrip(wave, static_cast<int>(p.value));
    case Family::kTimeStretch:
      return TimeStretch(wave, p.value);
  }
  throw ValidationError("unknown perturbation family");
}

}  // namespace cadd::perturb
