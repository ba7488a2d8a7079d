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

#include "cadd/stats/linguistics.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <unordered_set>

#include "cadd/common/error.h"
#include "cadd/common/hash.h"
#include "cadd/common/random.h"
#include "cadd/stats/tests.h"

namespace cadd::stats {

namespace {

bool IsVowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y'; }
bool IsAlpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

}  // namespace

int CountSyllables(std::string_view word) {
  std::string w;
  for (char c : word) {
    if (IsAlpha(c)) w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (w.empty()) return 0;
  int groups = 0;
  bool in_vowel = false;
  for (char c : w) {
    const bool v = IsVowel(c);
    if (v && !in_vowel) ++groups;
    in_vowel = v;
  }
  const std::size_t n = w.size();
  if (groups > 1 && w[n - 1] == 'e') {
    const bool consonant_le = n >= 3 && w[n - 2] == 'l' && !IsVowel(w[n - 3]);
    if (!consonant_le) --groups;
  }
  return std::max(groups, 1);
}

std::vector<std::string> Words(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!IsAlpha(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && IsAlpha(text[j])) ++j;
    if (j + 1 < text.size() && text[j] == '\'' && IsAlpha(text[j + 1])) {
      ++j;
      while (j < text.size() && IsAlpha(text[j])) ++j;
    }
    out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::size_t CountSentences(std::string_view text) {
  std::size_t sentences = 0;
  bool has_word = false;
  for (char c : text) {
    if (c == '.' || c == '!' || c == '?') {
      if (has_word) ++sentences;
      has_word = false;
    } else if (IsAlpha(c)) {
      has_word = true;
    }
  }
  return sentences + (has_word ? 1 : 0);
}

double TextStats::flesch() const {
  if (words == 0 || sentences == 0) throw ValidationError("flesch: text has no words");
  return 206.835 - 1.015 * (static_cast<double>(words) / static_cast<double>(sentences)) -
         84.6 * (static_cast<double>(syllables) / static_cast<double>(words));
}

double TextStats::mean_sentence_len() const {
  if (sentences == 0) throw ValidationError("sentence length: text has no sentences");
  return static_cast<double>(words) / static_cast<double>(sentences);
}

double TextStats::mean_word_len() const {
  if (words == 0) throw ValidationError("word length: text has no words");
  return static_cast<double>(letters) / static_cast<double>(words);
}

TextStats AnalyzeText(std::string_view text) {
  TextStats s;
  for (const auto& w : Words(text)) {
    ++s.words;
    s.syllables += static_cast<std::size_t>(CountSyllables(w));
    s.letters += static_cast<std::size_t>(std::count_if(w.begin(), w.end(), IsAlpha));
  }
  s.sentences = CountSentences(text);
  return s;
}

double FleschReadingEase(std::string_view text) { return AnalyzeText(text).flesch(); }

const std::vector<std::string>& StopWords() {
  static const std::vector<std::string> words = {
      "a",       "about",   "above",  "after",  "again",   "against", "all",     "am",     "an",      "and",
      "any",     "are",     "as",     "at",     "be",      "because", "been",    "before", "being",   "below",
      "between", "both",    "but",    "by",     "can",     "could",   "did",     "do",     "does",    "doing",
      "down",    "during",  "each",   "few",    "for",     "from",    "further", "had",    "has",     "have",
      "having",  "he",      "her",    "here",   "hers",    "herself", "him",     "himself", "his",    "how",
      "i",       "if",      "in",     "into",   "is",      "it",      "its",     "itself", "just",    "me",
      "more",    "most",    "my",     "myself", "no",      "nor",     "not",     "now",    "of",      "off",
      "on",      "once",    "only",   "or",     "other",   "our",     "ours",    "ourselves", "out",  "over",
      "own",     "same",    "she",    "should", "so",      "some",    "such",    "than",   "that",    "the",
      "their",   "theirs",  "them",   "themselves", "then", "there",  "these",   "they",   "this",    "those",
      "through", "to",      "too",    "under",  "until",   "up",      "very",    "was",    "we",      "were",
      "what",    "when",    "where",  "which",  "while",   "who",     "whom",    "why",    "will",    "with",
      "would",   "you",     "your",   "yours",  "yourself", "yourselves", "s",   "t",      "don",     "ll",
      "re",      "ve",      "m",      "d"};
  return words;
}

std::vector<std::string> LdaTokens(std::string_view text) {
  static const std::unordered_set<std::string> stop(StopWords().begin(), StopWords().end());
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty() && !stop.contains(cur)) out.push_back(cur);
    cur.clear();
  };
  for (char c : text) {
    if (IsAlpha(c)) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::vector<std::vector<std::string>> LdaTopWords(const std::vector<std::vector<std::string>>& docs,
                                                  const LdaOptions& o, std::uint64_t seed) {
  if (o.topics < 1 || o.iterations < 0 || o.top_words < 1 || o.alpha <= 0.0 || o.beta <= 0.0) {
    throw ValidationError("lda: invalid options");
  }
  std::set<std::string> vocab_set;
  for (const auto& d : docs) vocab_set.insert(d.begin(), d.end());
  if (vocab_set.empty()) throw ValidationError("lda: corpus has no tokens");
  const std::vector<std::string> vocab(vocab_set.begin(), vocab_set.end());
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < vocab.size(); ++i) index[vocab[i]] = static_cast<int>(i);

  const int k = o.topics;
  const int v = static_cast<int>(vocab.size());
  std::vector<std::vector<int>> words, z;
  for (const auto& d : docs) {
    if (d.empty()) continue;
    std::vector<int> ids;
    for (const auto& w : d) ids.push_back(index[w]);
    words.push_back(std::move(ids));
  }
  std::vector<int> n_dk(words.size() * k, 0), n_kw(static_cast<std::size_t>(k) * v, 0), n_k(k, 0);
  Rng rng(Mix64(seed ^ 0x1da1da1daULL));
  z.resize(words.size());
  for (std::size_t d = 0; d < words.size(); ++d) {
    for (int w : words[d]) {
      const int t = static_cast<int>(rng.Index(static_cast<std::uint64_t>(k)));
      z[d].push_back(t);
      ++n_dk[d * k + t];
      ++n_kw[static_cast<std::size_t>(t) * v + w];
      ++n_k[t];
    }
  }
  std::vector<double> weight(k);
  const double vbeta = v * o.beta;
  for (int it = 0; it < o.iterations; ++it) {
    for (std::size_t d = 0; d < words.size(); ++d) {
      for (std::size_t i = 0; i < words[d].size(); ++i) {
        const int w = words[d][i];
        int t = z[d][i];
        --n_dk[d * k + t];
        --n_kw[static_cast<std::size_t>(t) * v + w];
        --n_k[t];
        double total = 0.0;
        for (int c = 0; c < k; ++c) {
          total += (n_dk[d * k + c] + o.alpha) * (n_kw[static_cast<std::size_t>(c) * v + w] + o.beta) /
                   (n_k[c] + vbeta);
          weight[c] = total;
        }
        const double u = rng.Uniform() * total;
        t = 0;
        while (t < k - 1 && weight[t] <= u) ++t;
        z[d][i] = t;
        ++n_dk[d * k + t];
        ++n_kw[static_cast<std::size_t>(t) * v + w];
        ++n_k[t];
      }
    }
  }

  std::vector<std::vector<std::string>> top(k);
  const int take = std::min(o.top_words, v);
  std::vector<int> order(v);
  for (int t = 0; t < k; ++t) {
    for (int w = 0; w < v; ++w) order[w] = w;
    const int* row = &n_kw[static_cast<std::size_t>(t) * v];
    std::partial_sort(order.begin(), order.begin() + take, order.end(),
                      [row](int a, int b) { return row[a] != row[b] ? row[a] > row[b] : a < b; });
    for (int i = 0; i < take; ++i) top[t].push_back(vocab[order[i]]);
  }
  return top;
}

double TopicDiversity(const std::vector<std::vector<std::string>>& topics) {
  std::set<std::string> unique;
  std::size_t total = 0;
  for (const auto& t : topics) {
    unique.insert(t.begin(), t.end());
    total += t.size();
  }
  if (total == 0) throw ValidationError("topic diversity: no topic words");
  return static_cast<double>(unique.size()) / static_cast<double>(total);
}

std::vector<double> TopicDiversityRuns(const std::vector<std::string>& texts, int runs, const LdaOptions& options,
                                       bool parallel) {
  if (texts.empty()) throw ValidationError("topic diversity: empty corpus");
  if (runs < 1) throw ValidationError("topic diversity: runs must be positive");
  std::vector<std::vector<std::string>> docs;
  for (const auto& t : texts) docs.push_back(LdaTokens(t));
  std::vector<double> out(static_cast<std::size_t>(runs));
  const std::uint64_t s0 = options.first_seed;
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < runs; ++r) out[r] = TopicDiversity(LdaTopWords(docs, options, s0 + static_cast<std::uint64_t>(r)));
  } else {
    for (int r = 0; r < runs; ++r) out[r] = TopicDiversity(LdaTopWords(docs, options, s0 + static_cast<std::uint64_t>(r)));
  }
  return out;
}

double LinguisticProfile::mean_flesch() const { return Mean(flesch); }
double LinguisticProfile::mean_sentence_len() const { return Mean(sentence_len); }
double LinguisticProfile::mean_word_len() const { return Mean(word_len); }
double LinguisticProfile::mean_topic_diversity() const { return Mean(topic_diversity); }

nlohmann::json LinguisticProfile::ToJson() const {
  return {{"texts", flesch.size()},
          {"lda_runs", topic_diversity.size()},
          {"flesch", mean_flesch()},
          {"mean_sentence_len", mean_sentence_len()},
          {"mean_word_len", mean_word_len()},
          {"topic_diversity", mean_topic_diversity()}};
}

LinguisticProfile ProfileTexts(const std::vector<std::string>& texts, int lda_runs, const LdaOptions& options) {
  if (texts.empty()) throw ValidationError("linguistic profile: empty corpus");
  LinguisticProfile p;
  for (const auto& t : texts) {
    const TextStats s = AnalyzeText(t);
    if (s.words == 0) continue;
    p.flesch.push_back(s.flesch());
    p.sentence_len.push_back(s.mean_sentence_len());
    p.word_len.push_back(s.mean_word_len());
  }
  if (p.flesch.empty()) throw ValidationError("linguistic profile: corpus has no words");
  p.topic_diversity = TopicDiversityRuns(texts, lda_runs, options);
  return p;
}

std::vector<LinguisticComparison> CompareProfiles(const LinguisticProfile& a, const LinguisticProfile& b) {
  const std::vector<std::pair<std::string, std::pair<const std::vector<double>*, const std::vector<double>*>>> metrics =
      {{"flesch", {&a.flesch, &b.flesch}},
       {"mean_sentence_len", {&a.sentence_len, &b.sentence_len}},
       {"mean_word_len", {&a.word_len, &b.word_len}},
       {"topic_diversity", {&a.topic_diversity, &b.topic_diversity}}};
  std::vector<LinguisticComparison> out;
  std::vector<double> p;
  for (const auto& [name, pair] : metrics) {
    LinguisticComparison c;
    c.metric = name;
    c.mean_a = Mean(*pair.first);
    c.mean_b = Mean(*pair.second);
    c.p = IndependentTTest(*pair.first, *pair.second).p;
    p.push_back(c.p);
    out.push_back(c);
  }
  const auto adj = BenjaminiHochberg(p);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].p_adjusted = adj[i];
  return out;
}

}  // namespace cadd::stats
