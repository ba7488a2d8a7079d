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

#ifndef CADD_AUDIO_FEATURE_SET_H_
#define CADD_AUDIO_FEATURE_SET_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cadd/audio/cepstral.h"
#include "cadd/audio/encoder.h"

namespace cadd::audio {

enum class FeatureFamily : std::uint8_t { kLfcc = 1, kMfcc = 2, kEnc = 4 };

// Non-empty subset of {LFCC, MFCC, ENC}; families are always concatenated
// in that order.
class FeatureSetSpec {
 public:
  FeatureSetSpec() = default;
  explicit FeatureSetSpec(std::uint8_t mask);
  FeatureSetSpec(std::initializer_list<FeatureFamily> families);

  // "lfcc", "mfcc+enc", ... (case-insensitive, '+' or ',' separated).
  static FeatureSetSpec Parse(std::string_view text);

  bool Has(FeatureFamily f) const { return (mask_ & static_cast<std::uint8_t>(f)) != 0; }
  std::uint8_t mask() const { return mask_; }
  std::string ToString() const;
  bool operator==(const FeatureSetSpec&) const = default;

 private:
  std::uint8_t mask_ = static_cast<std::uint8_t>(FeatureFamily::kLfcc);
};

// All 7 non-empty subsets in mask order.
std::vector<FeatureSetSpec> AllFeatureSubsets();

struct FeatureExtractor {
  CepstralConfig lfcc = LfccConfig();
  CepstralConfig mfcc = MfccConfig();
  const SpeechEncoderProvider* encoder = nullptr;

  // frames x width matrix; families truncated to the shortest frame count.
  Eigen::MatrixXd Compute(const Waveform& wave, const FeatureSetSpec& spec) const;
  int Width(const FeatureSetSpec& spec) const;
  std::string Key(const FeatureSetSpec& spec) const;
};

// One binary file of little-endian doubles (row-major) per (sample id,
// feature key) plus a JSON sidecar with the shape and key hash.
class FeatureCache {
 public:
  explicit FeatureCache(std::filesystem::path dir);

  std::optional<Eigen::MatrixXd> Get(const std::string& sample_id, const std::string& key) const;
  void Put(const std::string& sample_id, const std::string& key, const Eigen::MatrixXd& m) const;

 private:
  std::filesystem::path Stem(const std::string& sample_id, const std::string& key) const;
  std::filesystem::path dir_;
};

}  // namespace cadd::audio

#endif  // CADD_AUDIO_FEATURE_SET_H_
