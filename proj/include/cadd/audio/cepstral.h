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

#ifndef CADD_AUDIO_CEPSTRAL_H_
#define CADD_AUDIO_CEPSTRAL_H_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cadd/audio/wav.h"

namespace cadd::audio {

enum class FilterScale { kLinear, kMel };

struct CepstralConfig {
  int n_coeffs = 20;
  double frame_length_ms = 25.0;
  double hop_ms = 10.0;
  int n_filters = 40;
  FilterScale scale = FilterScale::kMel;
  int n_fft = 512;
  double log_floor = 1e-10;
  double low_hz = 0.0;
  double high_hz = 8000.0;

  int FrameLength(int rate = kSampleRate) const;
  int Hop(int rate = kSampleRate) const;
  // Throws ValidationError when an invariant is broken.
  void Validate(int rate = kSampleRate) const;
  std::string Key() const;
};

CepstralConfig LfccConfig();
CepstralConfig MfccConfig();

double HzToMel(double hz);
double MelToHz(double mel);

std::size_t FrameCount(std::size_t n_samples, int frame_length, int hop);

// Symmetric Hann window of length n.
std::vector<double> HannWindow(int n);

// n_filters x (n_fft/2+1) triangular filterbank.
Eigen::MatrixXd Filterbank(const CepstralConfig& cfg, int rate = kSampleRate);

// frames x (n_fft/2+1) power spectrum of Hann-windowed frames.
Eigen::MatrixXd PowerSpectrogram(const Waveform& wave, const CepstralConfig& cfg);

// frames x n_filters linear filterbank energies (before the log).
Eigen::MatrixXd FilterbankEnergies(const Waveform& wave, const CepstralConfig& cfg);

// frames x n_coeffs: log filterbank energies followed by an orthonormal DCT-II.
Eigen::MatrixXd ExtractCepstral(const Waveform& wave, const CepstralConfig& cfg);

// Orthonormal DCT-II matrix (n x n); its transpose is the inverse.
Eigen::MatrixXd DctMatrix(int n);

}  // namespace cadd::audio

#endif  // CADD_AUDIO_CEPSTRAL_H_
