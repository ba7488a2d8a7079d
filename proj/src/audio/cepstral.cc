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

#include "cadd/audio/cepstral.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cadd/audio/fft.h"
#include "cadd/common/error.h"

namespace cadd::audio {

int CepstralConfig::FrameLength(int rate) const {
  return static_cast<int>(std::lround(frame_length_ms * rate / 1000.0));
}

int CepstralConfig::Hop(int rate) const { return static_cast<int>(std::lround(hop_ms * rate / 1000.0)); }

void CepstralConfig::Validate(int rate) const {
  if (n_coeffs < 1 || n_filters < 1) throw ValidationError("cepstral sizes must be positive");
  if (n_coeffs > n_filters) throw ValidationError("n_coeffs must not exceed n_filters");
  if (Hop(rate) < 1 || Hop(rate) > FrameLength(rate)) {
    throw ValidationError("hop must be positive and no longer than the frame");
  }
  if (FrameLength(rate) > n_fft) throw ValidationError("frame longer than FFT size");
  if (!(low_hz >= 0 && high_hz > low_hz && high_hz <= rate / 2.0)) {
    throw ValidationError("filterbank edges must satisfy 0 <= low < high <= Nyquist");
  }
  if (!(log_floor > 0)) throw ValidationError("log floor must be positive");
}

std::string CepstralConfig::Key() const {
  return std::string(scale == FilterScale::kMel ? "mel" : "lin") + "_c" + std::to_string(n_coeffs) +
         "_f" + std::to_string(n_filters) + "_w" + std::to_string(frame_length_ms) + "_h" +
         std::to_string(hop_ms) + "_n" + std::to_string(n_fft);
}

CepstralConfig LfccConfig() {
  CepstralConfig cfg;
  cfg.scale = FilterScale::kLinear;
  return cfg;
}

CepstralConfig MfccConfig() { return CepstralConfig{}; }

double HzToMel(double hz) { return 1127.0 * std::log1p(hz / 700.0); }
double MelToHz(double mel) { return 700.0 * std::expm1(mel / 1127.0); }

std::size_t FrameCount(std::size_t n_samples, int frame_length, int hop) {
  if (n_samples < static_cast<std::size_t>(frame_length)) return 0;
  return 1 + (n_samples - frame_length) / hop;
}

std::vector<double> HannWindow(int n) {
  std::vector<double> w(n, 1.0);
  if (n == 1) return w;
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
  return w;
}

Eigen::MatrixXd Filterbank(const CepstralConfig& cfg, int rate) {
  const int n_bins = cfg.n_fft / 2 + 1;
  const bool mel = cfg.scale == FilterScale::kMel;
  const double lo = mel ? HzToMel(cfg.low_hz) : cfg.low_hz;
  const double hi = mel ? HzToMel(cfg.high_hz) : cfg.high_hz;
  std::vector<double> edges(cfg.n_filters + 2);
  for (int i = 0; i < cfg.n_filters + 2; ++i) {
    const double p = lo + (hi - lo) * i / (cfg.n_filters + 1);
    edges[i] = mel ? MelToHz(p) : p;
  }
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(cfg.n_filters, n_bins);
  for (int m = 0; m < cfg.n_filters; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    for (int k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * rate / cfg.n_fft;
      double w = 0.0;
      if (f > left && f <= center) {
        w = (f - left) / (center - left);
      } else if (f > center && f < right) {
        w = (right - f) / (right - center);
      }
      fb(m, k) = w;
    }
  }
  return fb;
}

Eigen::MatrixXd PowerSpectrogram(const Waveform& wave, const CepstralConfig& cfg) {
  cfg.Validate(wave.rate);
  const int frame = cfg.FrameLength(wave.rate);
  const int hop = cfg.Hop(wave.rate);
  const std::size_t n_frames = FrameCount(wave.size(), frame, hop);
  if (n_frames == 0) {
    throw ValidationError("audio shorter than one frame (" + std::to_string(wave.size()) + " < " +
                          std::to_string(frame) + " samples)");
  }
  const std::vector<double> window = HannWindow(frame);
  const RealFft fft(cfg.n_fft);
  Eigen::MatrixXd power(static_cast<Eigen::Index>(n_frames), static_cast<Eigen::Index>(fft.bins()));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(n_frames); ++t) {
    std::vector<double> buf(cfg.n_fft, 0.0);
    const std::size_t start = static_cast<std::size_t>(t) * hop;
    for (int i = 0; i < frame; ++i) buf[i] = wave.samples[start + i] * window[i];
    const auto spec = fft.Forward(buf);
    for (std::size_t k = 0; k < spec.size(); ++k) power(t, static_cast<Eigen::Index>(k)) = std::norm(spec[k]);
  }
  return power;
}

Eigen::MatrixXd FilterbankEnergies(const Waveform& wave, const CepstralConfig& cfg) {
  return PowerSpectrogram(wave, cfg) * Filterbank(cfg, wave.rate).transpose();
}

Eigen::MatrixXd DctMatrix(int n) {
  Eigen::MatrixXd d(n, n);
  for (int k = 0; k < n; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
    for (int i = 0; i < n; ++i) d(k, i) = scale * std::cos(std::numbers::pi * k * (2 * i + 1) / (2.0 * n));
  }
  return d;
}

Eigen::MatrixXd ExtractCepstral(const Waveform& wave, const CepstralConfig& cfg) {
  Eigen::MatrixXd log_energy =
      FilterbankEnergies(wave, cfg).unaryExpr([&](double e) { return std::log(std::max(e, cfg.log_floor)); });
  const Eigen::MatrixXd dct = DctMatrix(cfg.n_filters).topRows(cfg.n_coeffs);
  return log_energy * dct.transpose();
}

}  // namespace cadd::audio
