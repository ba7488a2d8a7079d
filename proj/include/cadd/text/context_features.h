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

#ifndef CADD_TEXT_CONTEXT_FEATURES_H_
#define CADD_TEXT_CONTEXT_FEATURES_H_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cadd/audio/wav.h"
#include "cadd/common/variant.h"
#include "cadd/context/types.h"
#include "cadd/data/dataset.h"
#include "cadd/text/embedding.h"
#include "json.hpp"

namespace cadd::text {

struct FeatureBlock {
  std::string name;
  int width = 0;
  int offset = 0;
};

// Ordered named blocks of the raw (pre-normalization) feature vector.
class ContextFeatureSchema {
 public:
  static constexpr int kVersion = 1;

  // profile, gender, spouse, children, followers, followers_present,
  // news_title, news_body, post_title, post_body, comments.
  static ContextFeatureSchema Context(int d = kEmbeddingDim);
  static ContextFeatureSchema Transcript(int d = kEmbeddingDim);
  // Transcript blocks (if used) followed by context blocks (if used).
  static ContextFeatureSchema ForVariant(Variant v, int d = kEmbeddingDim);

  int width() const { return width_; }
  const std::vector<FeatureBlock>& blocks() const { return blocks_; }
  const FeatureBlock& Block(const std::string& name) const;
  std::string Signature() const;
  nlohmann::json ToJson() const;

 private:
  void Append(std::string name, int width);
  std::vector<FeatureBlock> blocks_;
  int width_ = 0;
};

// Raw context vector laid out per ContextFeatureSchema::Context(d). Missing
// pieces encode as zeros.
Eigen::VectorXd AssembleContextVector(const context::ContextBundle& bundle, const EmbeddingProvider& provider);

class AsrProvider {
 public:
  virtual ~AsrProvider() = default;
  virtual std::string Transcribe(const audio::Waveform& wave) const = 0;
};

// Runs `command <in.wav>` and reads the transcript from stdout.
class ExternalCommandAsr : public AsrProvider {
 public:
  explicit ExternalCommandAsr(std::string command);
  std::string Transcribe(const audio::Waveform& wave) const override;

 private:
  std::string command_;
};

// A stored transcript takes precedence over ASR; neither is an error.
std::string ResolveTranscript(const data::AudioSample& sample, const AsrProvider* asr);
Eigen::VectorXd TranscriptVector(const data::AudioSample& sample, const AsrProvider* asr,
                                 const EmbeddingProvider& provider);

// Concatenates the side inputs selected by the variant.
Eigen::VectorXd RawFeatureVector(Variant v, const Eigen::VectorXd& transcript, const Eigen::VectorXd& context);

}  // namespace cadd::text

#endif  // CADD_TEXT_CONTEXT_FEATURES_H_
