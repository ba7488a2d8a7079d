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

#include "cadd/data/dataset.h"

#include <sstream>

#include "cadd/common/error.h"
#include "cadd/common/io.h"

namespace cadd::data {

using nlohmann::json;

std::string_view LabelName(Label label) { return label == Label::kFake ? "fake" : "real"; }

Label ParseLabel(std::string_view text) {
  if (text == "real") return Label::kReal;
  if (text == "fake") return Label::kFake;
  throw ParseError("label must be \"real\" or \"fake\", got \"" + std::string(text) + "\"");
}

DatasetManifest::DatasetManifest(std::string name, std::vector<AudioSample> samples)
    : name_(std::move(name)) {
  samples_.reserve(samples.size());
  for (auto& s : samples) Add(std::move(s));
}

void DatasetManifest::Add(AudioSample sample) {
  if (sample.id.empty()) throw ValidationError("empty sample id");
  if (index_.count(sample.id)) throw ValidationError("duplicate id: " + sample.id);
  index_.emplace(sample.id, samples_.size());
  samples_.push_back(std::move(sample));
}

const AudioSample* DatasetManifest::Find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &samples_[it->second];
}

const AudioSample& DatasetManifest::At(std::string_view id) const {
  const AudioSample* s = Find(id);
  if (s == nullptr) throw ValidationError("unknown sample id: " + std::string(id));
  return *s;
}

std::vector<std::string> DatasetManifest::Ids() const {
  std::vector<std::string> ids;
  ids.reserve(samples_.size());
  for (const auto& s : samples_) ids.push_back(s.id);
  return ids;
}

std::size_t DatasetManifest::CountLabel(Label label) const {
  std::size_t n = 0;
  for (const auto& s : samples_) n += s.label == label;
  return n;
}

DatasetManifest DatasetManifest::Subset(const std::vector<std::string>& ids,
                                        std::string name) const {
  std::unordered_map<std::string, bool> wanted;
  for (const auto& id : ids) {
    At(id);
    wanted[id] = true;
  }
  DatasetManifest out;
  out.name_ = std::move(name);
  for (const auto& s : samples_) {
    if (wanted.count(s.id)) out.Add(s);
  }
  return out;
}

namespace {

AudioSample SampleFromJson(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ParseError("record is not a JSON object");
  auto require_string = [&](const char* key) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
      throw ParseError(std::string("missing or non-string key \"") + key + "\"");
    }
    return it->get<std::string>();
  };
  auto optional_string = [&](const char* key) -> std::optional<std::string> {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw ParseError(std::string("key \"") + key + "\" must be a string or null");
    return it->get<std::string>();
  };

  AudioSample s;
  s.id = require_string("id");
  std::filesystem::path audio = require_string("audio_path");
  s.audio_path = audio.is_absolute() || base_dir.empty() ? audio : base_dir / audio;
  s.label = ParseLabel(require_string("label"));
  s.subject = require_string("subject");
  if (auto date = optional_string("publish_date")) s.publish_date = Date::Parse(*date);
  s.transcript = optional_string("transcript");
  s.source_tag = optional_string("source_tag").value_or("");
  s.method = optional_string("method").value_or("");
  return s;
}

}  // namespace

DatasetManifest ParseManifest(std::string_view text, std::string name,
                              const std::filesystem::path& base_dir,
                              const ManifestLoadOptions& options) {
  DatasetManifest manifest(std::move(name), {});
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    AudioSample sample;
    try {
      sample = SampleFromJson(json::parse(line), base_dir);
    } catch (const json::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (options.check_audio_exists && !std::filesystem::exists(sample.audio_path)) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": audio file not found: " + sample.audio_path.string());
    }
    manifest.Add(std::move(sample));
  }
  return manifest;
}

DatasetManifest LoadManifest(const std::filesystem::path& path,
                             const ManifestLoadOptions& options) {
  return ParseManifest(ReadTextFile(path), path.stem().string(), path.parent_path(), options);
}

json SampleToJson(const AudioSample& s, const std::filesystem::path& relative_to) {
  std::filesystem::path audio = s.audio_path;
  if (!relative_to.empty()) audio = audio.lexically_proximate(relative_to);
  json j;
  j["id"] = s.id;
  j["audio_path"] = audio.generic_string();
  j["label"] = std::string(LabelName(s.label));
  j["subject"] = s.subject;
  j["publish_date"] = s.publish_date ? json(s.publish_date->ToString()) : json(nullptr);
  j["transcript"] = s.transcript ? json(*s.transcript) : json(nullptr);
  j["source_tag"] = s.source_tag;
  if (!s.method.empty()) j["method"] = s.method;
  return j;
}

void SaveManifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::string out;
  for (const auto& s : manifest.samples()) {
    out += SampleToJson(s, path.parent_path()).dump();
    out += '\n';
  }
  WriteFileAtomic(path, out);
}

LeakageGuard::LeakageGuard(const std::vector<std::string>& fit_ids) {
  for (const auto& id : fit_ids) allowed_[id] = true;
}

void LeakageGuard::CheckFitIds(const std::vector<std::string>& ids,
                               std::string_view operation) const {
  for (const auto& id : ids) {
    if (!allowed_.count(id)) {
      throw ValidationError("leakage: id '" + id + "' is not in the training split but reached " +
                            std::string(operation));
    }
  }
}

}  // namespace cadd::data
