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

#include <map>
#include <set>

#include <gtest/gtest.h>

#include "cadd/common/error.h"
#include "cadd/common/io.h"
#include "cadd/syn/syngen.h"
#include "test_util.h"

namespace cadd::syn {
namespace {

class FakeNews : public context::NewsProvider {
 public:
  explicit FakeNews(std::size_t n = 12) : n_(n) {}
  std::vector<context::NewsArticle> FetchNews(const std::string& subject,
                                              const std::optional<Date>& cutoff) override {
    cutoffs.push_back(cutoff);
    std::vector<context::NewsArticle> out;
    for (std::size_t i = 0; i < n_; ++i) {
      out.push_back({subject + " story " + std::to_string(i), "summary " + std::to_string(i),
                     Date(cutoff->days() - std::chrono::days(static_cast<long long>(i)))});
    }
    return out;
  }
  std::vector<std::optional<Date>> cutoffs;

 private:
  std::size_t n_;
};

class FailingNews : public context::NewsProvider {
 public:
  std::vector<context::NewsArticle> FetchNews(const std::string&, const std::optional<Date>&) override {
    throw ProviderError("news down", true);
  }
};

// Replays a script of replies, then repeats the last one.
class ScriptedLlm : public LlmProvider {
 public:
  explicit ScriptedLlm(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  std::string Generate(const std::string& prompt) override {
    prompts.push_back(prompt);
    return replies_[std::min(calls++, replies_.size() - 1)];
  }
  std::string name() const override { return "scripted"; }
  std::vector<std::string> prompts;
  std::size_t calls = 0;

 private:
  std::vector<std::string> replies_;
};

class BrokenCloner : public VoiceCloner {
 public:
  std::string name() const override { return "broken"; }
  audio::Waveform Clone(const audio::Waveform&, const std::string&) override {
    throw EnvironmentError("model weights missing");
  }
};

data::DatasetManifest Authentic(const std::filesystem::path& dir, std::size_t subjects,
                                const std::optional<Date>& date = Date(2024, 3, 1)) {
  data::DatasetManifest m("real", {});
  audio::Waveform w;
  w.samples.assign(800, 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) w.samples[i] = 0.1 * std::sin(0.05 * static_cast<double>(i));
  for (std::size_t i = 0; i < subjects; ++i) {
    data::AudioSample s;
    s.id = "real" + std::to_string(i);
    s.audio_path = dir / (s.id + ".wav");
    s.subject = "Person Number " + std::to_string(i);
    s.publish_date = date;
    audio::WriteWav(s.audio_path, w);
    m.Add(s);
  }
  return m;
}

SynOptions Fixed(std::uint64_t seed = 0) {
  SynOptions o;
  o.seed = seed;
  o.end_date = Date(2024, 12, 31);
  return o;
}

TEST(PromptTest, ContextFreeTemplates) {
  EXPECT_EQ(ContextFreePrompt("Ada Lovelace", Intent::kWouldSay),
            "Write something that Ada Lovelace would definitely say. Format your output as a json with the field "
            "\"text\".");
  EXPECT_EQ(ContextFreePrompt("Ada Lovelace", Intent::kWouldNotSay),
            "Write something that Ada Lovelace would definitely not say. Format your output as a json with the "
            "field \"text\".");
}

TEST(PromptTest, ContextAwareTemplateListsAtMostTenArticles) {
  std::vector<context::NewsArticle> news;
  for (int i = 1; i <= 12; ++i) news.push_back({"T" + std::to_string(i), "S" + std::to_string(i), Date(2024, 1, 1)});
  const auto p = ContextAwarePrompt("Ada", Intent::kWouldNotSay, news);
  EXPECT_EQ(p.rfind("Please read the following list of news titles along with their corresponding summaries:\n\n"
                    "ARTICLE 1\nTitle: T1\nSummary: S1\n\nARTICLE 2\n",
                    0),
            0u);
  EXPECT_NE(p.find("ARTICLE 10\nTitle: T10\nSummary: S10\n\n"), std::string::npos);
  EXPECT_EQ(p.find("ARTICLE 11"), std::string::npos);
  EXPECT_TRUE(p.ends_with("Given this context, write something that Ada would definitely not say. Format your "
                          "output as a JSON with the field \"text\"."));
}

TEST(LlmTest, ParsesTextField) {
  EXPECT_EQ(ParseLlmText(R"({"text": "hello"})"), "hello");
  EXPECT_EQ(ParseLlmText("```json\n{\"text\": \"fenced\"}\n```"), "fenced");
  EXPECT_FALSE(ParseLlmText("hello"));
  EXPECT_FALSE(ParseLlmText(R"({"txt": "x"})"));
  EXPECT_FALSE(ParseLlmText(R"({"text": 3})"));
  EXPECT_FALSE(ParseLlmText(R"({"text": "  "})"));
  EXPECT_FALSE(ParseLlmText(R"(["text"])"));
}

TEST(LlmTest, StubEchoesIntentDeterministically) {
  StubLlm llm(3);
  const auto say = ParseLlmText(llm.Generate(ContextFreePrompt("Ada", Intent::kWouldSay)));
  const auto not_say = ParseLlmText(llm.Generate(ContextFreePrompt("Ada", Intent::kWouldNotSay)));
  ASSERT_TRUE(say && not_say);
  EXPECT_NE(say->find("Ada (would say)"), std::string::npos);
  EXPECT_NE(not_say->find("Ada (would not say)"), std::string::npos);
  EXPECT_EQ(StubLlm(3).Generate("x"), StubLlm(3).Generate("x"));
}

TEST(LlmTest, MissingCommandIsEnvironmentError) {
  EXPECT_THROW(CommandLlm({"cadd-no-such-llm"}), EnvironmentError);
  EXPECT_THROW(CommandCloner("x", {"cadd-no-such-cloner"}), EnvironmentError);
}

TEST(SelectDateTest, PublishDateWinsElseUniformInRange) {
  EXPECT_EQ(SelectDate(Date(2024, 3, 1), Date(2023, 1, 1), Date(2025, 1, 1), 9), Date(2024, 3, 1));
  std::set<std::string> seen;
  for (std::uint64_t s = 0; s < 400; ++s) {
    const Date d = SelectDate(std::nullopt, Date(2023, 1, 1), Date(2023, 1, 10), s);
    ASSERT_GE(d, Date(2023, 1, 1));
    ASSERT_LE(d, Date(2023, 1, 10));
    seen.insert(d.ToString());
  }
  EXPECT_EQ(seen.size(), 10u);
  EXPECT_THROW(SelectDate(std::nullopt, Date(2023, 2, 1), Date(2023, 1, 1), 0), ValidationError);
}

TEST(TranscriptsTest, FourPerSubjectWithIntentsAndContext) {
  testing::TempDir tmp;
  const auto m = Authentic(tmp.path(), 3);
  FakeNews news;
  StubLlm llm;
  const auto set = GenerateFakeTranscripts(m, &news, llm, Fixed());
  ASSERT_EQ(set.records.size(), 12u);
  EXPECT_TRUE(set.failures.empty());
  std::map<std::string, int> per_subject;
  for (const auto& r : set.records) {
    ++per_subject[r.subject];
    EXPECT_FALSE(r.text.empty());
    EXPECT_EQ(r.date, Date(2024, 3, 1));
    EXPECT_NE(r.text.find(r.intent == Intent::kWouldSay ? "(would say)" : "(would not say)"), std::string::npos);
    EXPECT_EQ(r.news_count, r.context_aware ? 10u : 0u);
  }
  for (const auto& [subject, n] : per_subject) EXPECT_EQ(n, 4) << subject;
  EXPECT_EQ(set.records[0].intent, Intent::kWouldSay);
  EXPECT_FALSE(set.records[0].context_aware);
  EXPECT_EQ(set.records[3].intent, Intent::kWouldNotSay);
  EXPECT_TRUE(set.records[3].context_aware);
  ASSERT_EQ(news.cutoffs.size(), 3u);
  EXPECT_EQ(news.cutoffs[0], Date(2024, 3, 1));
}

TEST(TranscriptsTest, OneReferencePerSubjectPreferringDatedAudio) {
  testing::TempDir tmp;
  auto m = Authentic(tmp.path(), 1, std::nullopt);
  auto second = m.samples()[0];
  second.id = "dated";
  second.publish_date = Date(2022, 6, 1);
  m.Add(second);
  auto fake = second;
  fake.id = "fake";
  fake.label = data::Label::kFake;
  m.Add(fake);
  FakeNews news;
  StubLlm llm;
  const auto set = GenerateFakeTranscripts(m, &news, llm, Fixed());
  ASSERT_EQ(set.records.size(), 4u);
  for (const auto& r : set.records) {
    EXPECT_EQ(r.source_id, "dated");
    EXPECT_EQ(r.date, Date(2022, 6, 1));
    EXPECT_FALSE(r.date_sampled);
  }
}

TEST(TranscriptsTest, UndatedSubjectsSampleFromStartDateSeeded) {
  testing::TempDir tmp;
  const auto m = Authentic(tmp.path(), 4, std::nullopt);
  FakeNews news;
  StubLlm llm;
  const auto a = GenerateFakeTranscripts(m, &news, llm, Fixed(5));
  const auto b = GenerateFakeTranscripts(m, &news, llm, Fixed(5));
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_TRUE(a.records[i].date_sampled);
    EXPECT_GE(a.records[i].date, Date(2023, 1, 1));
    EXPECT_LE(a.records[i].date, Date(2024, 12, 31));
    EXPECT_EQ(a.records[i].date, b.records[i].date);
    EXPECT_EQ(a.records[i].text, b.records[i].text);
  }
}

TEST(TranscriptsTest, MalformedRepliesRetryThenSkip) {
  testing::TempDir tmp;
  const auto m = Authentic(tmp.path(), 1);
  FakeNews news;
  ScriptedLlm flaky({"not json", R"({"text": ""})", R"({"text": "third time"})"});
  const auto ok = GenerateFakeTranscripts(m, &news, flaky, Fixed());
  ASSERT_EQ(ok.records.size(), 4u);
  EXPECT_EQ(ok.records[0].attempts, 3);
  EXPECT_EQ(ok.records[0].text, "third time");
  EXPECT_EQ(ok.records[1].attempts, 1);

  ScriptedLlm broken({"nope"});
  const auto bad = GenerateFakeTranscripts(m, &news, broken, Fixed());
  EXPECT_TRUE(bad.records.empty());
  ASSERT_EQ(bad.failures.size(), 4u);
  EXPECT_EQ(broken.calls, 12u);
  EXPECT_EQ(bad.failures[0].attempts, 3);
}

TEST(TranscriptsTest, NewsOutageFailsOnlyContextAwareRecords) {
  testing::TempDir tmp;
  const auto m = Authentic(tmp.path(), 2);
  FailingNews news;
  StubLlm llm;
  const auto set = GenerateFakeTranscripts(m, &news, llm, Fixed());
  EXPECT_EQ(set.records.size(), 4u);
  EXPECT_EQ(set.failures.size(), 4u);
  for (const auto& r : set.records) EXPECT_FALSE(r.context_aware);
  EXPECT_THROW(GenerateFakeTranscripts(m, nullptr, llm, Fixed()), ValidationError);
}

TEST(TranscriptsTest, SaveLoadRoundTrip) {
  testing::TempDir tmp;
  const auto m = Authentic(tmp.path(), 2);
  FakeNews news;
  StubLlm llm;
  const auto set = GenerateFakeTranscripts(m, &news, llm, Fixed(4));
  SaveTranscripts(set, tmp / "t.jsonl");
  const auto back = LoadTranscripts(tmp / "t.jsonl");
  ASSERT_EQ(back.records.size(), set.records.size());
  EXPECT_EQ(back.seed, 4u);
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    EXPECT_EQ(back.records[i].ToJson(), set.records[i].ToJson());
  }
}

TEST(BalancedAssignmentsTest, Examples) {
  const std::vector<std::string> four{"a", "b", "c", "d"};
  std::map<std::string, int> counts;
  for (const auto& m : BalancedAssignments(four, 8, 0)) ++counts[m];
  for (const auto& m : four) EXPECT_EQ(counts[m], 2);
  counts.clear();
  for (const auto& m : BalancedAssignments(four, 9, 0)) ++counts[m];
  std::multiset<int> shape;
  for (const auto& [m, c] : counts) shape.insert(c);
  EXPECT_EQ(shape, (std::multiset<int>{3, 2, 2, 2}));
  EXPECT_TRUE(BalancedAssignments(four, 0, 0).empty());
  EXPECT_THROW(BalancedAssignments({}, 3, 0), ValidationError);
  EXPECT_THROW(BalancedAssignments({"a", "a"}, 3, 0), ValidationError);
}

TEST(BalancedAssignmentsTest, BalancedForAllSmallShapesAndSeeded) {
  std::vector<std::string> methods;
  for (int m = 1; m <= 6; ++m) {
    methods.push_back("m" + std::to_string(m));
    for (std::size_t n = 0; n <= 50; ++n) {
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto a = BalancedAssignments(methods, n, seed);
        ASSERT_EQ(a.size(), n);
        std::map<std::string, int> counts;
        for (const auto& x : methods) counts[x] = 0;
        for (const auto& x : a) ++counts.at(x);
        int lo = 1 << 30, hi = 0;
        for (const auto& [x, c] : counts) {
          lo = std::min(lo, c);
          hi = std::max(hi, c);
        }
        ASSERT_LE(hi - lo, 1) << m << " " << n;
        ASSERT_EQ(a, BalancedAssignments(methods, n, seed));
      }
    }
  }
  EXPECT_NE(BalancedAssignments(methods, 30, 1), BalancedAssignments(methods, 30, 2));
}

TEST(FakeAudioTest, StubClonersProduceCompleteBalancedManifest) {
  testing::TempDir tmp;
  const auto m = Authentic(tmp.path(), 3);
  FakeNews news;
  StubLlm llm;
  const auto set = GenerateFakeTranscripts(m, &news, llm, Fixed());
  std::vector<StubCloner> stubs;
  for (const auto& n : DefaultClonerNames()) stubs.emplace_back(n);
  std::vector<VoiceCloner*> cloners;
  for (auto& s : stubs) cloners.push_back(&s);
  const auto fakes = GenerateFakeAudio(set, cloners, tmp / "syn", 0);
  ASSERT_EQ(fakes.manifest.size(), set.records.size());
  EXPECT_TRUE(fakes.failures.empty());
  std::map<std::string, int> from_manifest, from_assign;
  for (const auto& a : fakes.assignments) ++from_assign[a];
  const std::set<std::string> allowed(DefaultClonerNames().begin(), DefaultClonerNames().end());
  const auto ref = audio::ReadWav(m.samples()[0].audio_path);
  for (const auto& s : fakes.manifest.samples()) {
    ++from_manifest[s.method];
    EXPECT_EQ(s.label, data::Label::kFake);
    ASSERT_TRUE(s.transcript.has_value());
    EXPECT_FALSE(s.transcript->empty());
    EXPECT_TRUE(allowed.count(s.method));
    EXPECT_EQ(audio::ReadWav(s.audio_path).samples.size(), ref.samples.size());
  }
  EXPECT_EQ(from_manifest, from_assign);
}

TEST(FakeAudioTest, ClonerFailureIsRecordLevel) {
  testing::TempDir tmp;
  const auto m = Authentic(tmp.path(), 2);
  FakeNews news;
  StubLlm llm;
  const auto set = GenerateFakeTranscripts(m, &news, llm, Fixed());
  StubCloner ok("ok");
  BrokenCloner broken;
  const auto fakes = GenerateFakeAudio(set, {&ok, &broken}, tmp / "syn", 1);
  EXPECT_EQ(fakes.manifest.size(), 4u);
  EXPECT_EQ(fakes.failures.size(), 4u);
  for (const auto& s : fakes.manifest.samples()) EXPECT_EQ(s.method, "ok");
}

TEST(FakeAudioTest, WholeRunIsByteDeterministic) {
  testing::TempDir tmp;
  const auto m = Authentic(tmp.path(), 3, std::nullopt);
  auto run = [&](const std::string& name) {
    FakeNews news;
    StubLlm llm(7);
    const auto set = GenerateFakeTranscripts(m, &news, llm, Fixed(7));
    StubCloner a("XTTS-v2"), b("MetaVoice");
    const auto fakes = GenerateFakeAudio(set, {&a, &b}, tmp / name, 7);
    return WriteSynDataset(m, set, fakes, tmp / name);
  };
  const auto p1 = run("one");
  const auto p2 = run("two");
  const auto f1 = ReadTextFile(p1.fake_manifest);
  EXPECT_EQ(f1, ReadTextFile(p2.fake_manifest));
  EXPECT_EQ(ReadTextFile(p1.generation_log), ReadTextFile(p2.generation_log));
  EXPECT_NE(f1.find("\"method\":\"XTTS-v2\""), std::string::npos);
  EXPECT_NE(f1.find("SYN seed=7"), std::string::npos);
  const auto all = data::LoadManifest(p1.dataset_manifest);
  EXPECT_EQ(all.CountLabel(data::Label::kReal), 3u);
  EXPECT_EQ(all.CountLabel(data::Label::kFake), 12u);
  const auto summary = ReadJsonFile(p1.summary);
  EXPECT_EQ(summary["fake"], 12);
  EXPECT_EQ(summary["per_method"]["XTTS-v2"].get<int>() + summary["per_method"]["MetaVoice"].get<int>(), 12);
}

}  // namespace
}  // namespace cadd::syn
