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

#include "cadd/text/context_features.h"

#include "cadd/common/error.h"
#include "cadd/common/process.h"

namespace cadd::text {

void ContextFeatureSchema::Append(std::string name, int width) {
  blocks_.push_back({std::move(name), width, width_});
  width_ += width;
}

ContextFeatureSchema ContextFeatureSchema::Context(int d) {
  ContextFeatureSchema s;
  s.Append("profile", d);
  s.Append("gender", 1);
  s.Append("spouse", 1);
  s.Append("children", 1);
  s.Append("followers", 1);
  s.Append("followers_present", 1);
  s.Append("news_title", d);
  s.Append("news_body", d);
  s.Append("post_title", d);
  s.Append("post_body", d);
  s.Append("comments", d);
  return s;
}

ContextFeatureSchema ContextFeatureSchema::Transcript(int d) {
  ContextFeatureSchema s;
  s.Append("transcript", d);
  return s;
}

ContextFeatureSchema ContextFeatureSchema::ForVariant(Variant v, int d) {
  ContextFeatureSchema s;
  if (UsesTranscript(v)) {
    const auto transcript = Transcript(d);
    for (const auto& b : transcript.blocks()) s.Append(b.name, b.width);
  }
  if (UsesContext(v)) {
    const auto context = Context(d);
    for (const auto& b : context.blocks()) s.Append(b.name, b.width);
  }
  return s;
}

const FeatureBlock& ContextFeatureSchema::Block(const std::string& name) const {
  for (const auto& b : blocks_) {
    if (b.name == name) return b;
  }
  throw ValidationError("schema has no block named " + name);
}

std::string ContextFeatureSchema::Signature() const {
  std::string sig = "v" + std::to_string(kVersion);
  for (const auto& b : blocks_) sig += "|" + b.name + ":" + std::to_string(b.width);
  return sig;
}

nlohmann::json ContextFeatureSchema::ToJson() const {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : blocks_) blocks.push_back({{"name", b.name}, {"width", b.width}, {"offset", b.offset}});
  return {{"version", kVersion}, {"width", width_}, {"blocks", blocks}};
}

namespace {

// Mean of the embeddings of the non-blank texts; zeros when there are none.
Eigen::VectorXd MeanEmbedding(const std::vector<std::string>& texts, const EmbeddingProvider& provider) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(provider.dim());
  int n = 0;
  for (const auto& t : texts) {
    if (t.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    acc += EmbedText(t, provider);
    ++n;
  }
  return n == 0 ? acc : Eigen::VectorXd(acc / n);
}

}  // namespace

Eigen::VectorXd AssembleContextVector(const context::ContextBundle& bundle, const EmbeddingProvider& provider) {
  const auto schema = ContextFeatureSchema::Context(provider.dim());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(schema.width());
  auto put = [&](const char* block, const Eigen::VectorXd& value) {
    const auto& b = schema.Block(block);
    v.segment(b.offset, b.width) = value;
  };
  auto put_scalar = [&](const char* block, double value) { v[schema.Block(block).offset] = value; };

  if (bundle.profile) {
    const auto& p = *bundle.profile;
    std::string occupations;
    for (const auto& o : p.occupations) occupations += (occupations.empty() ? "" : ", ") + o;
    put("profile", MeanEmbedding({p.description, occupations}, provider));
    put_scalar("gender", p.gender == context::Gender::kMale ? 1.0 : 0.0);
    put_scalar("spouse", p.has_spouse ? 1.0 : 0.0);
    put_scalar("children", static_cast<double>(p.n_children));
    put_scalar("followers", p.followers ? static_cast<double>(*p.followers) : 0.0);
    put_scalar("followers_present", p.followers ? 1.0 : 0.0);
  }

  std::vector<std::string> news_titles, news_bodies, post_titles, post_bodies, comments;
  for (const auto& a : bundle.news) {
    news_titles.push_back(a.title);
    news_bodies.push_back(a.body);
  }
  for (const auto& p : bundle.posts) {
    post_titles.push_back(p.title);
    post_bodies.push_back(p.body);
    comments.insert(comments.end(), p.comments.begin(), p.comments.end());
  }
  put("news_title", MeanEmbedding(news_titles, provider));
  put("news_body", MeanEmbedding(news_bodies, provider));
  put("post_title", MeanEmbedding(post_titles, provider));
  put("post_body", MeanEmbedding(post_bodies, provider));
  put("comments", MeanEmbedding(comments, provider));
  return v;
}

ExternalCommandAsr::ExternalCommandAsr(std::string command) : command_(std::move(command)) {
  if (!FindExecutable(command_)) throw EnvironmentError("ASR command not found: " + command_);
}

std::string ExternalCommandAsr::Transcribe(const audio::Waveform& wave) const {
  ScratchDir scratch;
  const auto in = scratch.path() / "in.wav";
  audio::WriteWav(in, wave);
  std::string out;
  if (RunProcess({command_, in.string()}, &out) != 0) throw EnvironmentError("ASR command failed");
  return out;
}

std::string ResolveTranscript(const data::AudioSample& sample, const AsrProvider* asr) {
  if (sample.transcript) return *sample.transcript;
  if (asr == nullptr) {
    throw ValidationError("sample " + sample.id + " has no transcript and no ASR provider is configured");
  }
  return asr->Transcribe(audio::ReadWav(sample.audio_path));
}

Eigen::VectorXd TranscriptVector(const data::AudioSample& sample, const AsrProvider* asr,
                                 const EmbeddingProvider& provider) {
  return EmbedText(ResolveTranscript(sample, asr), provider);
}

Eigen::VectorXd RawFeatureVector(Variant v, const Eigen::VectorXd& transcript, const Eigen::VectorXd& context) {
  Eigen::VectorXd out(0);
  if (UsesTranscript(v)) {
    out.conservativeResize(out.size() + transcript.size());
    out.tail(transcript.size()) = transcript;
  }
  if (UsesContext(v)) {
    out.conservativeResize(out.size() + context.size());
    out.tail(context.size()) = context;
  }
  return out;
}

}  // namespace cadd::text
