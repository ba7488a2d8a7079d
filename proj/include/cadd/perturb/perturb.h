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

#ifndef CADD_PERTURB_PERTURB_H_
#define CADD_PERTURB_PERTURB_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cadd/audio/wav.h"

namespace cadd::perturb {

enum class Family { kAirAbsorption, kBackgroundNoise, kGaussianNoise, kMp3, kTimeStretch };

std::string_view FamilyName(Family f);
Family ParseFamily(std::string_view text);

// value: metres, max noise factor, kbps or stretch rate; kind names the
// background-noise asset.
struct Perturbation {
  Family family = Family::kGaussianNoise;
  double value = 0.0;
  std::string kind;
  std::uint64_t seed = 0;

  // Stable identifier, e.g. "air_absorption_10m", "background_noise_rain",
  // "gaussian_noise_0.05", "mp3_8kbps", "time_stretch_0.6".
  std::string Name() const;
  static Perturbation Parse(std::string_view name, std::uint64_t seed = 0);
  bool InGrid() const;
  bool operator==(const Perturbation&) const = default;
};

inline constexpr double kBackgroundSnrDb = 10.0;
const std::vector<double>& AirDistances();
const std::vector<std::string>& NoiseKinds();
const std::vector<double>& GaussianMaxFactors();
const std::vector<int>& Mp3Bitrates();
const std::vector<double>& StretchRates();

// The 23 manipulations in family order; stochastic entries share `seed`.
std::vector<Perturbation> Grid(std::uint64_t seed = 0);

class Mp3Codec {
 public:
  virtual ~Mp3Codec() = default;
  virtual audio::Waveform RoundTrip(const audio::Waveform& wave, int kbps) const = 0;
  virtual std::string name() const = 0;
};

// Encodes and decodes with an ffmpeg binary (libmp3lame); the decoded
// signal is cropped or zero-padded back to the input length.
class FfmpegMp3Codec : public Mp3Codec {
 public:
  explicit FfmpegMp3Codec(std::string binary = "ffmpeg");
  audio::Waveform RoundTrip(const audio::Waveform& wave, int kbps) const override;
  std::string name() const override { return "ffmpeg:" + binary_; }

 private:
  std::string binary_;
};

// Deterministic stand-in: brick-wall low-pass at a bitrate-dependent cutoff
// followed by uniform quantization.
class NullMp3Codec : public Mp3Codec {
 public:
  audio::Waveform RoundTrip(const audio::Waveform& wave, int kbps) const override;
  std::string name() const override { return "null"; }
  static double CutoffHz(int kbps);
  static int QuantizerBits(int kbps);
};

// Noise assets: <dir>/<kind>.wav for every kind in NoiseKinds().
class NoiseBank {
 public:
  explicit NoiseBank(std::filesystem::path dir);
  const audio::Waveform& Get(const std::string& kind) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  mutable std::map<std::string, audio::Waveform> cache_;
};

struct Environment {
  const NoiseBank* noise = nullptr;
  const Mp3Codec* mp3 = nullptr;
};

// Pure transforms. Missing assets or codecs raise EnvironmentError.
audio::Waveform Apply(const Perturbation& p, const audio::Waveform& wave, const Environment& env);

// Atmospheric absorption in dB per metre at 20 C, 70 % relative humidity,
// 101.325 kPa.
double AirAttenuationDbPerMetre(double frequency_hz);
audio::Waveform AirAbsorption(const audio::Waveform& wave, double distance_m);
audio::Waveform MixBackground(const audio::Waveform& wave, const audio::Waveform& noise, double snr_db);
// factor ~ U[0.001, max_factor] from the seed.
double GaussianFactor(double max_factor, std::uint64_t seed);
// White noise of standard deviation `factor` with its component along the
// signal removed, so the output energy never drops below the input's.
audio::Waveform AddGaussianNoise(const audio::Waveform& wave, double factor, std::uint64_t seed);
// Phase vocoder (n_fft 512, hop 128); output length round(n / rate).
audio::Waveform TimeStretch(const audio::Waveform& wave, double rate);

}  // namespace cadd::perturb

#endif  // CADD_PERTURB_PERTURB_H_
