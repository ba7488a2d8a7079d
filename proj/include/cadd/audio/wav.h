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

#ifndef CADD_AUDIO_WAV_H_
#define CADD_AUDIO_WAV_H_

#include <filesystem>
#include <span>
#include <vector>

namespace cadd::audio {

inline constexpr int kSampleRate = 16000;

struct Waveform {
  std::vector<double> samples;
  int rate = kSampleRate;

  std::size_t size() const { return samples.size(); }
  double DurationSeconds() const { return static_cast<double>(samples.size()) / rate; }
};

// Reads a RIFF/WAVE PCM16 file, downmixes to mono and resamples to 16 kHz.
Waveform ReadWav(const std::filesystem::path& path);
// Same as ReadWav but keeps the file's native rate.
Waveform ReadWavNative(const std::filesystem::path& path);
// Writes mono PCM16; samples are clipped to [-1, 1].
void WriteWav(const std::filesystem::path& path, const Waveform& wave);

// Band-limited resampling with a Hann-windowed sinc kernel.
std::vector<double> Resample(std::span<const double> input, int from_rate, int to_rate);

double Rms(std::span<const double> samples);
bool AllFinite(std::span<const double> samples);

}  // namespace cadd::audio

#endif  // CADD_AUDIO_WAV_H_
