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

#include "cadd/syn/syngen.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "cadd/common/error.h"
#include "cadd/common/hash.h"
#include "cadd/common/io.h"
#include "cadd/common/process.h"
#include "cadd/common/random.h"
#include "httplib.h"

namespace cadd::syn {

using nlohmann::json;

std::string_view IntentName(Intent intent) {
  return intent == Intent::kWouldSay ? "would say" : "would not say";
}

Intent ParseIntent(std::string_view text) {
  if (text == "would say") return Intent::kWouldSay;
  if (text == "would not say") return Intent::kWouldNotSay;
  throw ValidationError("unknown intent: " + std::string(text));
}

namespace {

std::string Negation(Intent intent) { return intent == Intent::kWouldNotSay ? "not " : ""; }

}  // namespace

std::string ContextFreePrompt(const std::string& subject, Intent intent) {
  return "Write something that " + subject + " would definitely " + Negation(intent) +
         "say. Format your output as a json with the field \"text\".";
}

std::string ContextAwarePrompt(const std::string& subject, Intent intent,
                               const std::vector<context::NewsArticle>& news) {
  std::string p = "Please read the following list of news titles along with their corresponding summaries:\n\n";
  const std::size_t n = std::min(news.size(), kMaxPromptArticles);
  for (std::size_t i = 0; i < n; ++i) {
    p += "ARTICLE " + std::to_string(i + 1) + "\n";
    p += "Title: " + news[i].title + "\n";
    p += "Summary: " + news[i].body + "\n\n";
  }
  p += "Given this context, write something that " + subject + " would definitely " + Negation(intent) +
       "say. Format your output as a JSON with the field \"text\".";
  return p;
}

namespace {

const std::vector<std::string> kInCharacter{
    "the work is never finished, and we owe it to the next generation to keep going",
    "what matters is how we treat the people who have the least",
    "I have always said that honesty is the only policy worth keeping",
    "we should listen before we speak, and act after we listen",
    "the country is stronger when it argues in good faith",
};
const std::vector<std::string> kOutOfCharacter{
    "none of my principles were ever meant seriously",
    "I would happily sell every idea I stood for to the highest bidder",
    "the public never deserved the truth from me",
    "everything I said about fairness was a marketing slogan",
    "I secretly admired the very people I criticised",
};

std::string Between(const std::string& s, const std::string& open, const std::string& close) {
  const auto a = s.find(open);
  if (a == std::string::npos) return {};
  const auto b = s.find(close, a + open.size());
  return s.substr(a + open.size(), b == std::string::npos ? std::string::npos : b - a - open.size());
}

}  // namespace

std::string StubLlm::Generate(const std::string& prompt) {
  const bool negated = prompt.find("would definitely not say") != std::string::npos;
  std::string subject = Between(prompt, "something that ", " would definitely");
  if (subject.empty()) subject = "The speaker";
  Rng rng(Mix64(seed_ ^ Fnv1a64(prompt)));
  const auto& bank = negated ? kOutOfCharacter : kInCharacter;
  std::string text = subject + (negated ? " (would not say): " : " (would say): ") + bank[rng.Index(bank.size())] + ".";
  const std::string title = Between(prompt, "Title: ", "\n");
  if (!title.empty()) text += " About " + title + ", " + bank[rng.Index(bank.size())] + ".";
  return json{{"text", text}}.dump();
}

CommandLlm::CommandLlm(std::vector<std::string> argv) : argv_(std::move(argv)) {
  if (argv_.empty()) throw ValidationError("LLM command is empty");
  if (!FindExecutable(argv_.front())) throw EnvironmentError("LLM command not found: " + argv_.front());
}

std::string CommandLlm::Generate(const std::string& prompt) {
  ScratchDir scratch;
  const auto prompt_path = scratch.path() / "prompt.txt";
  WriteFileAtomic(prompt_path, prompt);
  auto argv = argv_;
  argv.push_back(prompt_path.string());
  std::string out;
  const int rc = RunProcess(argv, &out);
  if (rc != 0) throw EnvironmentError("LLM command exited with status " + std::to_string(rc));
  return out;
}

ChatLlm::ChatLlm(ChatLlmOptions options) : options_(std::move(options)) {
  if (options_.api_key.empty()) {
    if (const char* key = std::getenv("OPENAI_API_KEY")) options_.api_key = key;
  }
  if (options_.api_key.empty()) throw EnvironmentError("OPENAI_API_KEY is not set");
  if (options_.retry.max_attempts < 1) throw ValidationError("retry policy needs at least one attempt");
}

std::string ChatLlm::Generate(const std::string& prompt) {
  const auto scheme_end = options_.base_url.find("://");
  const auto path_start = options_.base_url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string origin = options_.base_url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : options_.base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  httplib::Client client(origin);
  const auto timeout_s = std::chrono::duration_cast<std::chrono::seconds>(options_.retry.timeout).count();
  client.set_connection_timeout(static_cast<time_t>(timeout_s));
  client.set_read_timeout(static_cast<time_t>(timeout_s));
  const httplib::Headers headers{{"Authorization", "Bearer " + options_.api_key}};
  const json body{{"model", options_.model},
                  {"temperature", options_.temperature},
                  {"response_format", {{"type", "json_object"}}},
                  {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};

  auto backoff = options_.retry.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
    auto res = client.Post(prefix + "/v1/chat/completions", headers, body.dump(), "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
    } else if (res->status >= 400) {
      throw ProviderError("chat completions: HTTP " + std::to_string(res->status), false);
    } else {
      try {
        return json::parse(res->body).at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const json::exception&) {
        throw ProviderError("chat completions: unexpected response shape", false);
      }
    }
    if (attempt < options_.retry.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff = std::chrono::milliseconds(static_cast<long long>(backoff.count() * options_.retry.multiplier));
    }
  }
  throw ProviderError("chat completions: " + last_error, true);
}

std::optional<std::string> ParseLlmText(std::string_view reply) {
  std::string s(reply);
  const auto fence = s.find("```");
  if (fence != std::string::npos) {
    const auto body = s.find('\n', fence);
    const auto end = s.rfind("```");
    if (body != std::string::npos && end > body) s = s.substr(body + 1, end - body - 1);
  }
  const json j = json::parse(s, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  const auto it = j.find("text");
  if (it == j.end() || !it->is_string()) return std::nullopt;
  auto text = it->get<std::string>();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return std::nullopt;
  return text;
}

Date SelectDate(const std::optional<Date>& publish_date, const Date& start, const Date& end, std::uint64_t seed) {
  if (publish_date) return *publish_date;
  if (end < start) throw ValidationError("date range is empty: " + start.ToString() + " > " + end.ToString());
  Rng rng(Mix64(seed));
  const auto span = static_cast<std::uint64_t>(end.DaysSinceEpoch() - start.DaysSinceEpoch());
  return Date(start.days() + std::chrono::days(static_cast<long long>(rng.Index(span + 1))));
}

json TranscriptRecord::ToJson() const {
  return json{{"id", id},
              {"subject", subject},
              {"source_id", source_id},
              {"reference_audio", reference_audio.generic_string()},
              {"intent", std::string(IntentName(intent))},
              {"context_aware", context_aware},
              {"date", date.ToString()},
              {"date_sampled", date_sampled},
              {"news_count", news_count},
              {"prompt", prompt},
              {"text", text},
              {"attempts", attempts}};
}

TranscriptRecord TranscriptRecord::FromJson(const json& j) {
  TranscriptRecord r;
  r.id = j.at("id").get<std::string>();
  r.subject = j.at("subject").get<std::string>();
  r.source_id = j.at("source_id").get<std::string>();
  r.reference_audio = j.at("reference_audio").get<std::string>();
  r.intent = ParseIntent(j.at("intent").get<std::string>());
  r.context_aware = j.at("context_aware").get<bool>();
  r.date = Date::Parse(j.at("date").get<std::string>());
  r.date_sampled = j.value("date_sampled", false);
  r.news_count = j.value("news_count", std::size_t{0});
  r.prompt = j.at("prompt").get<std::string>();
  r.text = j.at("text").get<std::string>();
  r.attempts = j.value("attempts", 1);
  if (r.text.empty()) throw ParseError("transcript record " + r.id + " has empty text");
  return r;
}

json RecordFailure::ToJson() const {
  return json{{"id", id}, {"subject", subject}, {"stage", stage}, {"error", error}, {"attempts", attempts}};
}

namespace {

// Subjects in first-appearance order with their chosen reference sample.
std::vector<const data::AudioSample*> References(const data::DatasetManifest& authentic) {
  std::vector<std::string> order;
  std::map<std::string, const data::AudioSample*> chosen;
  for (const auto& s : authentic.samples()) {
    if (s.label != data::Label::kReal) continue;
    auto it = chosen.find(s.subject);
    if (it == chosen.end()) {
      order.push_back(s.subject);
      chosen[s.subject] = &s;
    } else if (!it->second->publish_date && s.publish_date) {
      it->second = &s;
    }
  }
  std::vector<const data::AudioSample*> out;
  for (const auto& subject : order) out.push_back(chosen[subject]);
  return out;
}

std::string RecordId(const std::string& subject, Intent intent, bool context_aware) {
  return context::FixtureContextStub::Slug(subject) + "_syn_" + (intent == Intent::kWouldSay ? "say" : "notsay") +
         (context_aware ? "_ctx" : "_free");
}

}  // namespace

TranscriptSet GenerateFakeTranscripts(const data::DatasetManifest& authentic, context::NewsProvider* news,
                                      LlmProvider& llm, const SynOptions& options) {
  if (news == nullptr) throw ValidationError("a news provider is required for context-aware transcripts");
  if (options.max_attempts < 1) throw ValidationError("max_attempts must be at least 1");
  const Date end = options.end_date.value_or(Date::Today());

  TranscriptSet out;
  out.seed = options.seed;
  for (const auto* ref : References(authentic)) {
    const std::string& subject = ref->subject;
    const Date date = SelectDate(ref->publish_date, options.start_date, end, options.seed ^ Fnv1a64(subject));

    auto generate = [&](Intent intent, bool context_aware, const std::string& prompt, std::size_t news_count) {
      TranscriptRecord r;
      r.id = RecordId(subject, intent, context_aware);
      r.subject = subject;
      r.source_id = ref->id;
      r.reference_audio = ref->audio_path;
      r.intent = intent;
      r.context_aware = context_aware;
      r.date = date;
      r.date_sampled = !ref->publish_date.has_value();
      r.news_count = news_count;
      r.prompt = prompt;
      std::string last_error;
      for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
        r.attempts = attempt;
        try {
          if (auto text = ParseLlmText(llm.Generate(prompt))) {
            r.text = *text;
            out.records.push_back(std::move(r));
            return;
          }
          last_error = "reply is not a JSON object with a non-empty \"text\" field";
        } catch (const EnvironmentError& e) {
          last_error = e.what();
        }
      }
      out.failures.push_back({r.id, subject, "llm", last_error, r.attempts});
      LogWarning("transcript " + r.id + " skipped: " + last_error);
    };

    for (Intent intent : {Intent::kWouldSay, Intent::kWouldNotSay}) {
      generate(intent, false, ContextFreePrompt(subject, intent), 0);
    }
    std::vector<context::NewsArticle> articles;
    try {
      articles = news->FetchNews(subject, date);
    } catch (const EnvironmentError& e) {
      for (Intent intent : {Intent::kWouldSay, Intent::kWouldNotSay}) {
        out.failures.push_back({RecordId(subject, intent, true), subject, "context", e.what(), 0});
      }
      LogWarning("news for " + subject + " unavailable: " + e.what());
      continue;
    }
    std::stable_sort(articles.begin(), articles.end(),
                     [](const auto& a, const auto& b) { return a.published > b.published; });
    if (articles.size() > kMaxPromptArticles) articles.resize(kMaxPromptArticles);
    for (Intent intent : {Intent::kWouldSay, Intent::kWouldNotSay}) {
      generate(intent, true, ContextAwarePrompt(subject, intent, articles), articles.size());
    }
  }
  return out;
}

void SaveTranscripts(const TranscriptSet& set, const std::filesystem::path& path) {
  std::string text;
  for (const auto& r : set.records) {
    json j = r.ToJson();
    j["seed"] = set.seed;
    text += j.dump() + "\n";
  }
  WriteFileAtomic(path, text);
}

TranscriptSet LoadTranscripts(const std::filesystem::path& path) {
  TranscriptSet set;
  std::istringstream in(ReadTextFile(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      set.records.push_back(TranscriptRecord::FromJson(j));
      set.seed = j.value("seed", set.seed);
    } catch (const json::exception& e) {
      throw ParseError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return set;
}

std::vector<std::string> BalancedAssignments(const std::vector<std::string>& methods, std::size_t n,
                                             std::uint64_t seed) {
  if (methods.empty()) throw ValidationError("at least one voice cloning method is required");
  if (std::set<std::string>(methods.begin(), methods.end()).size() != methods.size()) {
    throw ValidationError("voice cloning methods must be distinct");
  }
  Rng rng(Mix64(seed ^ 0xba1a9ceULL));
  std::vector<std::string> order = methods;
  rng.Shuffle(std::span<std::string>(order));
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(order[i % order.size()]);
  rng.Shuffle(std::span<std::string>(out));
  return out;
}

const std::vector<std::string>& DefaultClonerNames() {
  static const std::vector<std::string> names{"XTTS-v2", "OpenVoice-v2", "MetaVoice", "WhisperSpeech"};
  return names;
}

CommandCloner::CommandCloner(std::string name, std::vector<std::string> argv)
    : name_(std::move(name)), argv_(std::move(argv)) {
  if (argv_.empty()) throw ValidationError("cloner command for " + name_ + " is empty");
  if (!FindExecutable(argv_.front())) throw EnvironmentError("cloner command not found: " + argv_.front());
}

audio::Waveform CommandCloner::Clone(const audio::Waveform& reference, const std::string& transcript) {
  ScratchDir scratch;
  const auto ref = scratch.path() / "reference.wav";
  const auto text = scratch.path() / "text.txt";
  const auto out = scratch.path() / "out.wav";
  audio::WriteWav(ref, reference);
  WriteFileAtomic(text, transcript);
  std::vector<std::string> argv;
  for (std::string a : argv_) {
    for (const auto& [key, value] : {std::pair{"{reference}", ref}, {"{text}", text}, {"{out}", out}}) {
      for (auto pos = a.find(key); pos != std::string::npos; pos = a.find(key)) {
        a.replace(pos, std::string_view(key).size(), value.string());
      }
    }
    argv.push_back(std::move(a));
  }
  const int rc = RunProcess(argv);
  if (rc != 0) throw EnvironmentError(name_ + " exited with status " + std::to_string(rc));
  if (!std::filesystem::exists(out)) throw EnvironmentError(name_ + " produced no output");
  return audio::ReadWav(out);
}

FakeAudioResult GenerateFakeAudio(const TranscriptSet& transcripts, const std::vector<VoiceCloner*>& cloners,
                                  const std::filesystem::path& out_dir, std::uint64_t seed) {
  std::vector<std::string> names;
  std::map<std::string, VoiceCloner*> by_name;
  for (auto* c : cloners) {
    if (c == nullptr) throw ValidationError("null voice cloner");
    names.push_back(c->name());
    by_name[c->name()] = c;
  }
  FakeAudioResult result;
  result.assignments = BalancedAssignments(names, transcripts.records.size(), seed);
  result.manifest = data::DatasetManifest("fake", {});
  const auto audio_dir = out_dir / "audio";
  std::filesystem::create_directories(audio_dir);

  std::map<std::filesystem::path, audio::Waveform> references;
  for (std::size_t i = 0; i < transcripts.records.size(); ++i) {
    const auto& r = transcripts.records[i];
    const auto& method = result.assignments[i];
    try {
      auto it = references.find(r.reference_audio);
      if (it == references.end()) it = references.emplace(r.reference_audio, audio::ReadWav(r.reference_audio)).first;
      const auto wave = by_name.at(method)->Clone(it->second, r.text);
      if (wave.samples.empty() || !audio::AllFinite(wave.samples)) throw EnvironmentError("empty or non-finite audio");
      data::AudioSample s;
      s.id = r.id;
      s.audio_path = audio_dir / (r.id + ".wav");
      s.label = data::Label::kFake;
      s.subject = r.subject;
      s.publish_date = r.date;
      s.transcript = r.text;
      s.source_tag = "SYN seed=" + std::to_string(seed);
      s.method = method;
      audio::WriteWav(s.audio_path, wave);
      result.manifest.Add(std::move(s));
    } catch (const Error& e) {
      result.failures.push_back({r.id, r.subject, "clone:" + method, e.what(), 1});
      LogWarning("clone " + r.id + " with " + method + " failed: " + e.what());
    }
  }
  return result;
}

SynDatasetPaths WriteSynDataset(const data::DatasetManifest& authentic, const TranscriptSet& transcripts,
                                const FakeAudioResult& fakes, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  SynDatasetPaths paths{out_dir / "transcripts.jsonl", out_dir / "fake.jsonl", out_dir / "dataset.jsonl",
                        out_dir / "generation_log.jsonl", out_dir / "summary.json"};
  SaveTranscripts(transcripts, paths.transcripts);
  SaveManifest(fakes.manifest, paths.fake_manifest);

  data::DatasetManifest all("dataset", {});
  for (const auto& s : authentic.samples()) {
    if (s.label == data::Label::kReal) all.Add(s);
  }
  for (const auto& s : fakes.manifest.samples()) all.Add(s);
  SaveManifest(all, paths.dataset_manifest);

  std::map<std::string, std::string> failed;
  for (const auto& f : transcripts.failures) failed[f.id] = f.stage + ": " + f.error;
  for (const auto& f : fakes.failures) failed[f.id] = f.stage + ": " + f.error;
  std::string log;
  for (std::size_t i = 0; i < transcripts.records.size(); ++i) {
    const auto& r = transcripts.records[i];
    json j{{"id", r.id},
           {"subject", r.subject},
           {"intent", std::string(IntentName(r.intent))},
           {"context_aware", r.context_aware},
           {"date", r.date.ToString()},
           {"date_sampled", r.date_sampled},
           {"news_count", r.news_count},
           {"prompt", r.prompt},
           {"attempts", r.attempts},
           {"method", i < fakes.assignments.size() ? json(fakes.assignments[i]) : json(nullptr)}};
    const auto f = failed.find(r.id);
    j["status"] = f == failed.end() ? "ok" : "failed";
    if (f != failed.end()) j["error"] = f->second;
    log += j.dump() + "\n";
  }
  for (const auto& f : transcripts.failures) {
    log += json{{"id", f.id}, {"subject", f.subject}, {"status", "failed"}, {"error", f.stage + ": " + f.error},
                {"attempts", f.attempts}}
               .dump() +
           "\n";
  }
  WriteFileAtomic(paths.generation_log, log);

  std::map<std::string, int> per_method;
  for (const auto& s : fakes.manifest.samples()) ++per_method[s.method];
  json failures = json::array();
  for (const auto& f : transcripts.failures) failures.push_back(f.ToJson());
  for (const auto& f : fakes.failures) failures.push_back(f.ToJson());
  WriteJsonFile(paths.summary, json{{"seed", transcripts.seed},
                                    {"real", all.size() - fakes.manifest.size()},
                                    {"transcripts", transcripts.records.size()},
                                    {"fake", fakes.manifest.size()},
                                    {"per_method", per_method},
                                    {"failures", failures}});
  return paths;
}

}  // namespace cadd::syn
