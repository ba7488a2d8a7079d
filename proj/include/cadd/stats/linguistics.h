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

#ifndef CADD_STATS_LINGUISTICS_H_
#define CADD_STATS_LINGUISTICS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace cadd::stats {

// Vowel groups (a e i o u y), minus a silent final "e" unless the word
// ends in consonant + "le"; at least one per word.
int CountSyllables(std::string_view word);

// Alphabetic words (apostrophe contractions kept whole).
std::vector<std::string> Words(std::string_view text);
// Sentences end at runs of . ! ?; a trailing fragment counts.
std::size_t CountSentences(std::string_view text);

struct TextStats {
  std::size_t words = 0;
  std::size_t sentences = 0;
  std::size_t syllables = 0;
  std::size_t letters = 0;

  double flesch() const;
  double mean_sentence_len() const;
  double mean_word_len() const;
};

TextStats AnalyzeText(std::string_view text);
double FleschReadingEase(std::string_view text);

// Lowercased alphabetic tokens without stop words.
std::vector<std::string> LdaTokens(std::string_view text);
const std::vector<std::string>& StopWords();

struct LdaOptions {
  int topics = 5;
  int iterations = 200;
  double alpha = 0.1;
  double beta = 0.1;
  int top_words = 10;
  // Run r uses seed first_seed + r.
  std::uint64_t first_seed = 0;
};

// Collapsed Gibbs sampler over token lists; returns per-topic top words
// (by count, ties broken by word).
std::vector<std::vector<std::string>> LdaTopWords(const std::vector<std::vector<std::string>>& docs,
                                                  const LdaOptions& options, std::uint64_t seed);

// Unique words over total words across the topic lists.
double TopicDiversity(const std::vector<std::vector<std::string>>& topics);

// One diversity per seed in [first_seed, first_seed + runs). The serial and
// parallel paths give identical results.
std::vector<double> TopicDiversityRuns(const std::vector<std::string>& texts, int runs, const LdaOptions& options = {},
                                       bool parallel = true);

struct LinguisticProfile {
  std::vector<double> flesch;             // per text
  std::vector<double> sentence_len;       // per text
  std::vector<double> word_len;           // per text
  std::vector<double> topic_diversity;    // per LDA run

  double mean_flesch() const;
  double mean_sentence_len() const;
  double mean_word_len() const;
  double mean_topic_diversity() const;
  nlohmann::json ToJson() const;
};

inline constexpr int kLdaRuns = 100;

LinguisticProfile ProfileTexts(const std::vector<std::string>& texts, int lda_runs = kLdaRuns,
                               const LdaOptions& options = {});

struct LinguisticComparison {
  std::string metric;
  double mean_a = 0.0, mean_b = 0.0;
  double p = 1.0;
  double p_adjusted = 1.0;
};

// Independent t-tests per metric between two corpora, BH-adjusted over the
// four metrics.
std::vector<LinguisticComparison> CompareProfiles(const LinguisticProfile& a, const LinguisticProfile& b);

}  // namespace cadd::stats

#endif  // CADD_STATS_LINGUISTICS_H_
