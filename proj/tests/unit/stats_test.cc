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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "cadd/common/error.h"
#include "cadd/common/random.h"
#include "cadd/stats/linguistics.h"
#include "cadd/stats/tests.h"

namespace cadd::stats {
namespace {

// Enumerates every labelling of the pooled sample and counts how many give
// a U at least as extreme, using plain midranks.
double BruteForceLessP(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size();
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    double less = 0, equal = 0;
    for (double v : pooled) {
      less += v < pooled[i];
      equal += v == pooled[i];
    }
    rank[i] = less + (equal + 1) / 2.0;
  }
  auto rank_sum = [&](const std::vector<bool>& in_a) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += in_a[i] ? rank[i] : 0.0;
    return s;
  };
  std::vector<bool> obs(n, false);
  std::fill(obs.begin(), obs.begin() + static_cast<long>(a.size()), true);
  const double observed = rank_sum(obs);
  std::vector<bool> mask(n, false);
  std::fill(mask.end() - static_cast<long>(a.size()), mask.end(), true);
  double hits = 0, total = 0;
  do {
    total += 1;
    hits += rank_sum(mask) <= observed + 1e-9;
  } while (std::next_permutation(mask.begin(), mask.end()));
  return hits / total;
}

TEST(MannWhitneyTest, DisjointThreeVersusThree) {
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  const auto r = MannWhitneyU(a, b, Alternative::kLess);
  EXPECT_TRUE(r.exact);
  EXPECT_DOUBLE_EQ(r.u, 0.0);
  EXPECT_NEAR(r.p, 0.05, 1e-15);
}

TEST(MannWhitneyTest, OneVersusOne) {
  const std::vector<double> a{1}, b{2};
  EXPECT_NEAR(MannWhitneyU(a, b, Alternative::kLess).p, 0.5, 1e-15);
}

TEST(MannWhitneyTest, IdenticalMultisetsTwoSidedIsOne) {
  const std::vector<double> a{0.1, 0.4, 0.4, 0.9}, b{0.4, 0.9, 0.1, 0.4};
  EXPECT_DOUBLE_EQ(MannWhitneyU(a, b, Alternative::kTwoSided).p, 1.0);
}

TEST(MannWhitneyTest, ExactMatchesBruteForceWithTies) {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t na = 1 + rng.Index(5), nb = 1 + rng.Index(6);
    std::vector<double> a(na), b(nb);
    for (auto& v : a) v = static_cast<double>(rng.Index(4));
    for (auto& v : b) v = static_cast<double>(rng.Index(4));
    const auto r = MannWhitneyU(a, b, Alternative::kLess, MwuMethod::kExact);
    ASSERT_NEAR(r.p, BruteForceLessP(a, b), 1e-12) << "trial " << trial;
    // Greater is Less with the samples swapped.
    ASSERT_NEAR(MannWhitneyU(a, b, Alternative::kGreater, MwuMethod::kExact).p, BruteForceLessP(b, a), 1e-12);
  }
}

TEST(MannWhitneyTest, SixVersusSixMatchesReference) {
  const std::vector<double> a{1, 3, 5, 7, 9, 11}, b{2, 4, 6, 8, 10, 12};
  EXPECT_NEAR(MannWhitneyU(a, b, Alternative::kLess).p, 0.3495670995670996, 1e-12);
}

TEST(MannWhitneyTest, NormalApproximationMatchesReference) {
  std::vector<double> a(10), b(10);
  std::iota(a.begin(), a.end(), 1.0);
  std::iota(b.begin(), b.end(), 11.0);
  const auto r = MannWhitneyU(a, b, Alternative::kLess);
  EXPECT_FALSE(r.exact);
  EXPECT_NEAR(r.p, 9.133589555477501e-05, 1e-12);

  const std::vector<double> c{1, 2, 2, 3, 5, 5, 5, 7, 9, 10}, d{2, 4, 5, 6, 6, 8, 9, 11, 12, 12, 13};
  const auto two = MannWhitneyU(c, d, Alternative::kTwoSided);
  EXPECT_DOUBLE_EQ(two.u, 28.0);
  EXPECT_NEAR(two.p, 0.060592194741646906, 1e-12);
  EXPECT_NEAR(MannWhitneyU(c, d, Alternative::kLess).p, 0.030296097370823453, 1e-12);
}

TEST(MannWhitneyTest, ExactAndNormalAgreeForModerateSamples) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t na = 5 + rng.Index(4), nb = 5 + rng.Index(4);
    std::vector<double> a(na), b(nb);
    const double shift = rng.Uniform(0.0, 1.5);
    for (auto& v : a) v = rng.Normal();
    for (auto& v : b) v = rng.Normal() + shift;
    const double exact = MannWhitneyU(a, b, Alternative::kLess, MwuMethod::kExact).p;
    const double normal = MannWhitneyU(a, b, Alternative::kLess, MwuMethod::kNormal).p;
    ASSERT_LE(std::abs(exact - normal), 0.02) << na << "v" << nb;
  }
}

TEST(MannWhitneyTest, EmptySampleFails) {
  const std::vector<double> a{1.0}, none;
  EXPECT_THROW(MannWhitneyU(a, none, Alternative::kLess), ValidationError);
}

TEST(BenjaminiHochbergTest, Examples) {
  const std::vector<double> p{0.01, 0.02, 0.03};
  for (double v : BenjaminiHochberg(p)) EXPECT_NEAR(v, 0.03, 1e-15);
  EXPECT_EQ(BenjaminiHochberg(std::vector<double>{0.2}), std::vector<double>{0.2});
  EXPECT_EQ(BenjaminiHochberg(std::vector<double>{1, 1, 1}), (std::vector<double>{1, 1, 1}));
  // Order is preserved: 0.04 (rank 2) -> 0.06, 0.01 (rank 1) -> 0.03, 0.5 -> 0.5.
  const auto adj = BenjaminiHochberg(std::vector<double>{0.04, 0.01, 0.5});
  EXPECT_NEAR(adj[0], 0.06, 1e-15);
  EXPECT_NEAR(adj[1], 0.03, 1e-15);
  EXPECT_NEAR(adj[2], 0.5, 1e-15);
}

TEST(BenjaminiHochbergTest, OutOfRangeFails) {
  EXPECT_THROW(BenjaminiHochberg(std::vector<double>{0.1, 1.2}), ValidationError);
  EXPECT_THROW(BenjaminiHochberg(std::vector<double>{-0.1}), ValidationError);
}

TEST(BenjaminiHochbergTest, MonotoneAndNeverBelowRaw) {
  Rng rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> p(1 + rng.Index(12));
    for (auto& v : p) v = rng.Uniform() < 0.2 ? rng.Uniform(0, 0.01) : rng.Uniform();
    const auto adj = BenjaminiHochberg(p);
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return p[i] < p[j]; });
    for (std::size_t k = 0; k < p.size(); ++k) {
      ASSERT_GE(adj[k], p[k]);
      ASSERT_LE(adj[k], 1.0);
      if (k > 0) ASSERT_LE(adj[order[k - 1]], adj[order[k]]);
    }
    // Adjusting a subset keeps every value at or above its raw p.
    const std::vector<double> half(p.begin(), p.begin() + static_cast<long>((p.size() + 1) / 2));
    const auto sub = BenjaminiHochberg(half);
    for (std::size_t k = 0; k < half.size(); ++k) ASSERT_GE(sub[k], half[k]);
  }
}

TEST(StarsTest, Thresholds) {
  EXPECT_EQ(Stars(0.0005), "***");
  EXPECT_EQ(Stars(0.001), "**");
  EXPECT_EQ(Stars(0.005), "**");
  EXPECT_EQ(Stars(0.01), "*");
  EXPECT_EQ(Stars(0.049), "*");
  EXPECT_EQ(Stars(0.05), "--");
}

std::vector<eval::ScoredSample> Scores(const std::vector<double>& p, int y) {
  std::vector<eval::ScoredSample> out;
  for (std::size_t i = 0; i < p.size(); ++i) out.push_back(eval::ScoredSample::Make("s" + std::to_string(i), y, p[i]));
  return out;
}

TEST(ErrorComparisonTest, PerfectCaddAgainstWorstBaseline) {
  const auto baseline = Scores({0, 0, 0, 0, 0}, 1);
  const auto cadd = Scores({1, 1, 1, 1, 1}, 1);
  const auto c = CompareErrors(baseline, cadd, "toy");
  EXPECT_NEAR(c.p, 1.0 / 252.0, 1e-15);
  EXPECT_EQ(c.direction, "cadd_lower");
  EXPECT_EQ(c.stars(), "**");
}

TEST(ErrorComparisonTest, IdenticalErrorsAreNotSignificant) {
  const auto s = Scores({0.2, 0.7, 0.4, 0.9}, 1);
  const auto c = CompareErrors(s, s);
  EXPECT_DOUBLE_EQ(c.p_two_sided, 1.0);
  EXPECT_EQ(c.direction, "none");
  EXPECT_EQ(c.stars(), "--");
}

TEST(ErrorComparisonTest, IdMismatchFails) {
  auto a = Scores({0.1, 0.2}, 0);
  auto b = Scores({0.1, 0.2}, 0);
  b[1].id = "other";
  EXPECT_THROW(CompareErrors(a, b), ValidationError);
}

TEST(ErrorComparisonTest, FamilyAdjustment) {
  std::vector<ErrorComparison> family(3);
  family[0].p = 0.01;
  family[1].p = 0.02;
  family[2].p = 0.03;
  AdjustFamily(family);
  for (const auto& c : family) EXPECT_NEAR(c.p_adjusted, 0.03, 1e-15);
}

TEST(CategoryComparisonTest, SplitsByCategory) {
  std::vector<eval::ScoredSample> s;
  std::map<std::string, std::string> cat;
  for (int i = 0; i < 6; ++i) {
    s.push_back(eval::ScoredSample::Make("e" + std::to_string(i), 1, 0.99 - 0.01 * i));
    cat["e" + std::to_string(i)] = "Entertainment";
    s.push_back(eval::ScoredSample::Make("p" + std::to_string(i), 1, 0.5 - 0.01 * i));
    cat["p" + std::to_string(i)] = "Politics";
  }
  const auto c = CompareCategories(s, cat, "Entertainment", "*");
  EXPECT_EQ(c.n_a, 6u);
  EXPECT_EQ(c.n_b, 6u);
  EXPECT_LT(c.median_a, c.median_b);
  EXPECT_NEAR(c.p, 2.0 / 924.0, 1e-15);
  EXPECT_THROW(CompareCategories(s, cat, "Sports", "*"), ValidationError);
}

TEST(TTestTest, MatchesReference) {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 4, 6, 8, 10.5};
  const auto r = IndependentTTest(a, b);
  EXPECT_NEAR(r.t, -1.8831158916154396, 1e-12);
  EXPECT_DOUBLE_EQ(r.df, 8.0);
  EXPECT_NEAR(r.p, 0.09644216162407057, 1e-12);
}

TEST(LinguisticsTest, FleschOfTheCatSat) {
  const auto s = AnalyzeText("The cat sat.");
  EXPECT_EQ(s.words, 3u);
  EXPECT_EQ(s.sentences, 1u);
  EXPECT_EQ(s.syllables, 3u);
  EXPECT_NEAR(s.flesch(), 119.19, 1e-9);
}

TEST(LinguisticsTest, SyllableCounter) {
  EXPECT_EQ(CountSyllables("the"), 1);
  EXPECT_EQ(CountSyllables("make"), 1);
  EXPECT_EQ(CountSyllables("table"), 2);
  EXPECT_EQ(CountSyllables("beautiful"), 3);
  EXPECT_EQ(CountSyllables("rhythm"), 1);
  EXPECT_EQ(CountSyllables("Senate"), 2);
  EXPECT_EQ(CountSyllables("don't"), 1);
}

TEST(LinguisticsTest, SentencesAndWordLengths) {
  const auto s = AnalyzeText("Hello there! How are you? Fine");
  EXPECT_EQ(s.sentences, 3u);
  EXPECT_EQ(s.words, 6u);
  EXPECT_DOUBLE_EQ(s.mean_sentence_len(), 2.0);
  EXPECT_DOUBLE_EQ(s.mean_word_len(), 23.0 / 6.0);
  EXPECT_EQ(Words("it's 3 o'clock"), (std::vector<std::string>{"it's", "o'clock"}));
}

TEST(LinguisticsTest, TopicDiversityArithmetic) {
  const std::vector<std::string> ten{"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
  EXPECT_DOUBLE_EQ(TopicDiversity(std::vector<std::vector<std::string>>(5, ten)), 0.2);
  std::vector<std::vector<std::string>> distinct(5);
  for (int t = 0; t < 5; ++t) {
    for (int w = 0; w < 10; ++w) distinct[t].push_back("w" + std::to_string(t * 10 + w));
  }
  EXPECT_DOUBLE_EQ(TopicDiversity(distinct), 1.0);
}

TEST(LinguisticsTest, LdaTokensDropStopWordsAndNonAlphabetic) {
  EXPECT_EQ(LdaTokens("The Senate voted 42 times, and THE budget passed!"),
            (std::vector<std::string>{"senate", "voted", "times", "budget", "passed"}));
}

std::vector<std::string> TwoThemeCorpus() {
  std::vector<std::string> texts;
  for (int i = 0; i < 10; ++i) {
    texts.push_back("senate budget election senate vote budget committee election vote senate");
    texts.push_back("guitar concert album guitar tour concert album stage guitar tour");
  }
  return texts;
}

TEST(LinguisticsTest, LdaSeparatesDisjointThemes) {
  std::vector<std::vector<std::string>> docs;
  for (const auto& t : TwoThemeCorpus()) docs.push_back(LdaTokens(t));
  LdaOptions o;
  o.topics = 2;
  o.top_words = 3;
  const auto top = LdaTopWords(docs, o, 0);
  const std::set<std::string> politics{"senate", "budget", "election", "vote", "committee"};
  for (const auto& topic : top) {
    const auto hits = std::count_if(topic.begin(), topic.end(), [&](const auto& w) { return politics.contains(w); });
    EXPECT_TRUE(hits == 0 || hits == 3);
  }
  EXPECT_DOUBLE_EQ(TopicDiversity(top), 1.0);
}

TEST(LinguisticsTest, DiversityRunsAreDeterministicAndBackendIndependent) {
  const auto texts = TwoThemeCorpus();
  LdaOptions o;
  o.iterations = 50;
  const auto parallel = TopicDiversityRuns(texts, 12, o, true);
  const auto serial = TopicDiversityRuns(texts, 12, o, false);
  const auto again = TopicDiversityRuns(texts, 12, o, true);
  ASSERT_EQ(parallel.size(), 12u);
  for (std::size_t i = 0; i < parallel.size(); ++i) {
    EXPECT_EQ(parallel[i], serial[i]);
    EXPECT_NEAR(parallel[i], again[i], 1e-12);
    EXPECT_GT(parallel[i], 0.0);
    EXPECT_LE(parallel[i], 1.0);
  }
}

TEST(LinguisticsTest, ProfileAndComparison) {
  const std::vector<std::string> simple{"The cat sat. The dog ran.", "We go home now. It is fun.",
                                        "I see a big red ball."};
  const std::vector<std::string> complex{
      "Legislative appropriations necessitate comprehensive bipartisan deliberation.",
      "Constitutional interpretation remains extraordinarily controversial.",
      "Macroeconomic stabilization requires considerable institutional coordination."};
  const auto a = ProfileTexts(simple, 5);
  const auto b = ProfileTexts(complex, 5);
  EXPECT_GT(a.mean_flesch(), b.mean_flesch());
  EXPECT_LT(a.mean_word_len(), b.mean_word_len());
  const auto cmp = CompareProfiles(a, b);
  ASSERT_EQ(cmp.size(), 4u);
  EXPECT_EQ(cmp[0].metric, "flesch");
  EXPECT_LT(cmp[0].p, 0.05);
  for (const auto& c : cmp) EXPECT_GE(c.p_adjusted, c.p);
  EXPECT_THROW(ProfileTexts({}, 5), ValidationError);
}

}  // namespace
}  // namespace cadd::stats
