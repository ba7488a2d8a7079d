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

#include <cmath>

#include <gtest/gtest.h>

#include "cadd/common/error.h"
#include "cadd/common/random.h"
#include "cadd/eval/metrics.h"
#include "cadd/eval/reconcile.h"
#include "unit/test_util.h"

namespace cadd::eval {
namespace {

std::vector<ScoredSample> Scores(const std::vector<double>& real, const std::vector<double>& fake) {
  std::vector<ScoredSample> out;
  for (std::size_t i = 0; i < real.size(); ++i) out.push_back(ScoredSample::Make("r" + std::to_string(i), 0, real[i]));
  for (std::size_t i = 0; i < fake.size(); ++i) out.push_back(ScoredSample::Make("f" + std::to_string(i), 1, fake[i]));
  return out;
}

// Random scores on a coarse grid so ties are common.
std::vector<ScoredSample> RandomScores(Rng& rng, std::size_t max_n) {
  std::vector<ScoredSample> out;
  const std::size_t n = 2 + rng.Index(max_n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = i == 0 ? 0 : (i == 1 ? 1 : static_cast<int>(rng.Index(2)));
    out.push_back(ScoredSample::Make("s" + std::to_string(i), y, static_cast<double>(rng.Index(5)) / 4.0));
  }
  return out;
}

// EER by scanning every threshold between distinct scores and locating
// where FPR and FNR cross, independent of the ROC walk.
double ThresholdScanEer(const std::vector<ScoredSample>& s) {
  std::vector<double> thresholds{-1.0, 2.0};
  for (const auto& a : s) thresholds.push_back(a.p);
  std::sort(thresholds.begin(), thresholds.end());
  double nr = 0, nf = 0;
  for (const auto& a : s) (a.y ? nf : nr) += 1;
  auto rates = [&](double t) {
    double fp = 0, fn = 0;
    for (const auto& a : s) {
      if (a.y == 0 && a.p >= t) fp += 1;
      if (a.y == 1 && a.p < t) fn += 1;
    }
    return std::pair<double, double>{fp / nr, fn / nf};
  };
  // Decreasing thresholds move FPR up and FNR down.
  std::pair<double, double> prev = rates(2.0);
  for (auto it = thresholds.rbegin(); it != thresholds.rend(); ++it) {
    const auto cur = rates(*it);
    const double d0 = prev.second - prev.first, d1 = cur.second - cur.first;
    if (d1 <= 0.0) {
      const double a = d0 / (d0 - d1);
      return 100.0 * (prev.first + a * (cur.first - prev.first));
    }
    prev = cur;
  }
  return 100.0;
}

TEST(MetricsTest, AvgScoreMatchesPublishedRows) {
  EXPECT_NEAR(AvgScore(92.91, 85.44, 16.05), 87.43, 0.005);
  EXPECT_EQ(Round2(AvgScore(92.91, 85.44, 16.05)), 87.43);
  EXPECT_EQ(Round2(AvgScore(98.98, 94.12, 4.94)), 96.05);
}

TEST(MetricsTest, PerfectSeparation) {
  const EvalReport r = ComputeMetrics(Scores({0.1, 0.2}, {0.8, 0.9}));
  EXPECT_EQ(*r.auc, 100.0);
  EXPECT_EQ(*r.eer, 0.0);
  EXPECT_EQ(r.fake.f1, 100.0);
  EXPECT_EQ(*r.avg, 100.0);
}

TEST(MetricsTest, IdenticalDistributionsGiveEer50) {
  EXPECT_EQ(EqualErrorRate(Scores({0.5}, {0.5})), 50.0);
  EXPECT_EQ(EqualErrorRate(Scores({0.1, 0.2, 0.7}, {0.7, 0.2, 0.1})), 50.0);
  EXPECT_EQ(RankAuc(Scores({0.1, 0.2, 0.7}, {0.7, 0.2, 0.1})), 50.0);
}

TEST(MetricsTest, ClassificationCountsByHand) {
  // real: 0.2 (TN), 0.6 (FP); fake: 0.4 (FN), 0.7 (TP), 0.9 (TP)
  const EvalReport r = ComputeMetrics(Scores({0.2, 0.6}, {0.4, 0.7, 0.9}));
  EXPECT_NEAR(r.fake.precision, 100.0 * 2 / 3, 1e-12);
  EXPECT_NEAR(r.fake.recall, 100.0 * 2 / 3, 1e-12);
  EXPECT_NEAR(r.real.precision, 50.0, 1e-12);
  EXPECT_NEAR(r.real.recall, 50.0, 1e-12);
  EXPECT_NEAR(r.weighted.f1, 0.4 * 50.0 + 0.6 * 100.0 * 2 / 3, 1e-12);
  EXPECT_NEAR(*r.auc, 100.0 * 5 / 6, 1e-12);
  EXPECT_NEAR(r.scored[2].abs_error, 0.6, 1e-15);
}

TEST(MetricsTest, SingleClassOmitsRankMetrics) {
  const EvalReport r = ComputeMetrics(Scores({}, {0.7, 0.2}));
  EXPECT_FALSE(r.auc.has_value());
  EXPECT_FALSE(r.avg.has_value());
  EXPECT_EQ(r.fake.recall, 50.0);
  EXPECT_THROW(RankAuc(r.scored), ValidationError);
  EXPECT_THROW(ComputeMetrics({}), ValidationError);
}

TEST(MetricsPropertyTest, RankAucEqualsPairCountingExactly) {
  Rng rng(21);
  for (int trial = 0; trial < 3000; ++trial) {
    const auto s = RandomScores(rng, 10);
    EXPECT_EQ(RankAuc(s), PairwiseAuc(s));
  }
}

TEST(MetricsPropertyTest, EerMatchesThresholdScanAndStaysBounded) {
  Rng rng(22);
  for (int trial = 0; trial < 2000; ++trial) {
    auto s = RandomScores(rng, 12);
    EXPECT_NEAR(EqualErrorRate(s), ThresholdScanEer(s), 1e-9);
    // Bound holds when fake scores dominate real ones: shift fakes up.
    for (auto& a : s) {
      if (a.y == 1) a.p += 1.0;
    }
    const double eer = EqualErrorRate(s);
    EXPECT_GE(eer, 0.0);
    EXPECT_LE(eer, 50.0);
  }
}

TEST(MetricsPropertyTest, IdenticalMultisetsGiveEer50) {
  Rng rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(1 + rng.Index(8));
    for (double& x : v) x = static_cast<double>(rng.Index(4)) / 3.0;
    EXPECT_NEAR(EqualErrorRate(Scores(v, v)), 50.0, 1e-9);
  }
}

TEST(MetricsPropertyTest, AvgIdentityAndMonotoneRecall) {
  Rng rng(24);
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = RandomScores(rng, 20);
    const EvalReport r = ComputeMetrics(s);
    EXPECT_NEAR(*r.avg, AvgScore(*r.auc, r.fake.f1, *r.eer), 1e-9);
    double last = 101.0;
    for (double t = -0.1; t <= 1.1; t += 0.05) {
      const double recall = ComputeMetrics(s, t).fake.recall;
      EXPECT_LE(recall, last);
      last = recall;
    }
  }
}

TEST(MetricsTest, JsonRoundTrip) {
  const EvalReport r = ComputeMetrics(Scores({0.2, 0.6}, {0.4, 0.7, 0.9}));
  const EvalReport back = EvalReport::FromJson(r.ToJson());
  EXPECT_EQ(back.ToJson(), r.ToJson());
  EXPECT_NE(ReportCsvRow("x", r).find("83.33"), std::string::npos);
}

TEST(MetricsTest, MeanReportAveragesScalars) {
  EvalReport a = ComputeMetrics(Scores({0.1}, {0.9}));
  EvalReport b = a, c = a;
  a.avg = 1.0;
  b.avg = 2.0;
  c.avg = 3.0;
  EXPECT_EQ(*MeanReport({a, b, c}).avg, 2.0);
  const EvalReport single = ComputeMetrics(Scores({0.3, 0.1}, {0.9, 0.4}));
  EXPECT_EQ(MeanReport({single}).ToJson(), single.ToJson());
}

TEST(DegradationTest, DeltasAndCsv) {
  const EvalReport clean = ComputeMetrics(Scores({0.1, 0.2}, {0.8, 0.9}));
  EvalReport worse = ComputeMetrics(Scores({0.1, 0.85}, {0.8, 0.9}));
  DegradationTable t;
  t.AddColumn("lcnn", clean, {{"none", clean}, {"noisy", worse}});
  EXPECT_EQ(t.Delta("none", "lcnn"), 0.0);
  EXPECT_NEAR(t.Delta("noisy", "lcnn"), *worse.avg - 100.0, 1e-12);
  EXPECT_NEAR(t.MeanDelta("lcnn"), (*worse.avg - 100.0) / 2, 1e-12);

  EvalReport c90 = clean, c82 = clean;
  c90.avg = 90.0;
  c82.avg = 82.0;
  t.AddColumn("meso", c90, {{"none", c90}, {"noisy", c82}});
  EXPECT_EQ(t.Delta("noisy", "meso"), -8.0);
  EXPECT_EQ(t.ToCsv().substr(0, 23), "perturbation,lcnn,meso\n");
  EXPECT_NE(t.ToCsv().find("noisy,"), std::string::npos);

  EvalReport other = ComputeMetrics(Scores({0.1}, {0.8, 0.9}));
  EXPECT_THROW(t.AddColumn("x", clean, {{"none", clean}, {"noisy", other}}), ValidationError);
}

TEST(ReconcileTest, PublishedClaimsReproduce) {
  const auto rows = LoadPublishedTables(std::filesystem::path(CADD_SOURCE_DIR) / "data/published_tables.csv");
  const auto claims = LoadClaims(std::filesystem::path(CADD_SOURCE_DIR) / "data/published_claims.csv");
  const Reconciliation r = Reconcile(rows, claims);
  ASSERT_EQ(r.claims.size(), 2u);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(Round2(r.claims[0].recomputed), 87.43);
  EXPECT_EQ(Round2(r.claims[1].recomputed), 96.05);
  EXPECT_TRUE(r.claims[1].is_group_max);
  // The 87.43 row is not the largest JDD baseline Avg.
  EXPECT_FALSE(r.claims[0].is_group_max);
  EXPECT_EQ(r.claims[0].group_max_row, "JDD/LCNN/Baseline");
  EXPECT_EQ(Round2(r.claims[0].group_max), 89.73);
}

TEST(ReconcileTest, WrongClaimIsReported) {
  std::vector<PublishedRow> rows{{"D", "M", "Baseline", 90.0, 80.0, 10.0}};
  const Reconciliation r = Reconcile(rows, {{"c", 86.66, "D", "M", "Baseline", "Baseline"}});
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(Round2(r.claims[0].recomputed), 86.67);
  EXPECT_THROW(Reconcile(rows, {{"c", 1.0, "D", "Q", "Baseline", "Baseline"}}), ValidationError);
}

}  // namespace
}  // namespace cadd::eval
