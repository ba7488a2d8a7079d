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

#ifndef CADD_SYN_SYNGEN_H_
#define CADD_SYN_SYNGEN_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cadd/audio/wav.h"
#include "cadd/common/date.h"
#include "cadd/context/providers.h"
#include "cadd/data/dataset.h"

namespace cadd::syn {

enum class Intent { kWouldSay, kWouldNotSay };

// "would say" / "would not say".
std::string_view IntentName(Intent intent);
Intent ParseIntent(std::string_view text);

inline constexpr std::size_t kMaxPromptArticles = 10;
inline constexpr int kTranscriptsPerSubject = 4;

std::string ContextFreePrompt(const std::string& subject, Intent intent);
// Uses at most the first kMaxPromptArticles articles; the body is the summary.
std::string ContextAwarePrompt(const std::string& subject, Intent intent,
                               const std::vector<context::NewsArticle>& news);

class LlmProvider {
 public:
  virtual ~LlmProvider() = default;
  // Raw model output, expected to be a JSON object with a string field "text".
  virtual std::string Generate(const std::string& prompt) = 0;
  virtual std::string name() const = 0;
};

// Seeded canned responses. The reply names the subject and echoes the intent
// found in the prompt, and mentions the first article title when present.
class StubLlm : public LlmProvider {
 public:
  explicit StubLlm(std::uint64_t seed = 0) : seed_(seed) {}
  std::string Generate(const std::string& prompt) override;
  std::string name() const override { return "stub"; }

 private:
  std::uint64_t seed_;
};

// Runs `argv... <prompt-file>` and reads the reply from stdout.
class CommandLlm : public LlmProvider {
 public:
  explicit CommandLlm(std::vector<std::string> argv);
  std::string Generate(const std::string& prompt) override;
  std::string name() const override { return "command:" + argv_.front(); }

 private:
  std::vector<std::string> argv_;
};

struct ChatLlmOptions {
  std::string base_url = "https://api.openai.com";
  std::string model = "gpt-4o";
  double temperature = 1.0;
  // Read from OPENAI_API_KEY when empty.
  std::string api_key;
  context::RetryPolicy retry;
};

// OpenAI-compatible chat-completions endpoint with JSON response format.
class ChatLlm : public LlmProvider {
 public:
  explicit ChatLlm(ChatLlmOptions options);
  std::string Generate(const std::string& prompt) override;
  std::string name() const override { return "chat:" + options_.model; }

 private:
  ChatLlmOptions options_;
};

// The "text" field of a model reply, tolerating a surrounding code fence.
// nullopt when the reply is not a JSON object with a non-empty string "text".
std::optional<std::string> ParseLlmText(std::string_view reply);

struct SynOptions {
  Date start_date{2023, 1, 1};
  // Upper end of the random date range; today when absent.
  std::optional<Date> end_date;
  std::uint64_t seed = 0;
  int max_attempts = 3;
};

// The authentic publish date when present, else uniform over [start, end].
Date SelectDate(const std::optional<Date>& publish_date, const Date& start, const Date& end, std::uint64_t seed);

struct TranscriptRecord {
  std::string id;
  std::string subject;
  std::string source_id;
  std::filesystem::path reference_audio;
  Intent intent = Intent::kWouldSay;
  bool context_aware = false;
  Date date;
  bool date_sampled = false;
  std::size_t news_count = 0;
  std::string prompt;
  std::string text;
  int attempts = 0;

  nlohmann::json ToJson() const;
  static TranscriptRecord FromJson(const nlohmann::json& j);
};

struct RecordFailure {
  std::string id;
  std::string subject;
  std::string stage;
  std::string error;
  int attempts = 0;

  nlohmann::json ToJson() const;
};

struct TranscriptSet {
  std::vector<TranscriptRecord> records;
  std::vector<RecordFailure> failures;
  std::uint64_t seed = 0;
};

// One reference per subject: its first REAL sample with a publish date, else
// its first REAL sample. Subjects are visited in manifest order and yield
// {would say, would not say} x {context-free, context-aware}.
TranscriptSet GenerateFakeTranscripts(const data::DatasetManifest& authentic, context::NewsProvider* news,
                                      LlmProvider& llm, const SynOptions& options);

void SaveTranscripts(const TranscriptSet& set, const std::filesystem::path& path);
TranscriptSet LoadTranscripts(const std::filesystem::path& path);

// Counts per method differ by at most one; the surplus methods and the order
// are drawn from the seed.
std::vector<std::string> BalancedAssignments(const std::vector<std::string>& methods, std::size_t n,
                                             std::uint64_t seed);

const std::vector<std::string>& DefaultClonerNames();

class VoiceCloner {
 public:
  virtual ~VoiceCloner() = default;
  virtual std::string name() const = 0;
  virtual audio::Waveform Clone(const audio::Waveform& reference, const std::string& transcript) = 0;
};

// Returns the reference unchanged.
class StubCloner : public VoiceCloner {
 public:
  explicit StubCloner(std::string name) : name_(std::move(name)) {}
  std::string name() const override { return name_; }
  audio::Waveform Clone(const audio::Waveform& reference, const std::string&) override { return reference; }

 private:
  std::string name_;
};

// Subprocess shim. Arguments may contain {reference}, {text} and {out}, which
// are replaced by a reference WAV, a UTF-8 transcript file and the WAV path
// the command must write.
class CommandCloner : public VoiceCloner {
 public:
  CommandCloner(std::string name, std::vector<std::string> argv);
  std::string name() const override { return name_; }
  audio::Waveform Clone(const audio::Waveform& reference, const std::string& transcript) override;

 private:
  std::string name_;
  std::vector<std::string> argv_;
};

struct FakeAudioResult {
  data::DatasetManifest manifest;
  std::vector<std::string> assignments;
  std::vector<RecordFailure> failures;
};

// Writes <out_dir>/audio/<id>.wav for every record that clones successfully.
FakeAudioResult GenerateFakeAudio(const TranscriptSet& transcripts, const std::vector<VoiceCloner*>& cloners,
                                  const std::filesystem::path& out_dir, std::uint64_t seed);

struct SynDatasetPaths {
  std::filesystem::path transcripts;
  std::filesystem::path fake_manifest;
  std::filesystem::path dataset_manifest;
  std::filesystem::path generation_log;
  std::filesystem::path summary;
};

// Writes transcripts.jsonl, fake.jsonl, dataset.jsonl (authentic REAL rows
// followed by the fakes), generation_log.jsonl and summary.json.
SynDatasetPaths WriteSynDataset(const data::DatasetManifest& authentic, const TranscriptSet& transcripts,
                                const FakeAudioResult& fakes, const std::filesystem::path& out_dir);

}  // namespace cadd::syn

#endif  // CADD_SYN_SYNGEN_H_
