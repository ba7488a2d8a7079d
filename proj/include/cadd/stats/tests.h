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

#ifndef CADD_STATS_TESTS_H_
#define CADD_STATS_TESTS_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "cadd/eval/metrics.h"
#include "json.hpp"

namespace cadd::stats {

// kLess: the first sample is stochastically smaller than the second.
enum class Alternative { kLess, kGreater, kTwoSided };

enum class MwuMethod { kAuto, kExact, kNormal };

Alternative ParseAlternative(std::string_view text);

struct MwuResult {
  double u = 0.0;  // U of the first sample, midranks for ties
  double p = 1.0;
  bool exact = false;
};

// Exact path (subset-sum over doubled midranks) when min(n) <= 8 and
// n1 + n2 <= kExactMaxTotal; otherwise normal approximation with tie
// corrected variance and continuity correction.
inline constexpr std::size_t kExactMaxN = 8;
inline constexpr std::size_t kExactMaxTotal = 1000;
MwuResult MannWhitneyU(std::span<const double> a, std::span<const double> b, Alternative alt,
                       MwuMethod method = MwuMethod::kAuto);

// Student's two-sample t-test with pooled variance, two-sided.
struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};
TTestResult IndependentTTest(std::span<const double> a, std::span<const double> b);

// Step-up adjusted p-values in input order.
std::vector<double> BenjaminiHochberg(std::span<const double> p);

// "***" p<0.001, "**" p<0.01, "*" p<0.05, otherwise "--".
std::string Stars(double p);

double Median(std::vector<double> values);
double Mean(std::span<const double> values);

// One-sided test that CADD absolute errors are smaller than the baseline's.
struct ErrorComparison {
  std::string name;
  std::size_t n = 0;
  double baseline_median = 0.0;
  double cadd_median = 0.0;
  double u = 0.0;
  double p = 1.0;             // one-sided, CADD lower
  double p_two_sided = 1.0;
  double p_adjusted = 1.0;
  bool exact = false;
  std::string direction;  // "cadd_lower", "cadd_higher" or "none"

  std::string stars() const { return Stars(p_adjusted); }
  nlohmann::json ToJson() const;
};

ErrorComparison CompareErrors(const std::vector<eval::ScoredSample>& baseline,
                              const std::vector<eval::ScoredSample>& cadd, std::string name = {});

// BH across one family; fills p_adjusted.
void AdjustFamily(std::vector<ErrorComparison>& family);

// Two-sided comparison of absolute errors between two id groups (e.g.
// Entertainment vs other subjects) within one report.
struct GroupComparison {
  std::string name;
  std::string group_a, group_b;
  std::size_t n_a = 0, n_b = 0;
  double median_a = 0.0, median_b = 0.0;
  double p = 1.0;
  double p_adjusted = 1.0;

  std::string stars() const { return Stars(p_adjusted); }
  nlohmann::json ToJson() const;
};

GroupComparison CompareCategories(const std::vector<eval::ScoredSample>& scored,
                                  const std::map<std::string, std::string>& category_of_id, const std::string& group_a,
                                  const std::string& group_b, std::string name = {});

void AdjustFamily(std::vector<GroupComparison>& family);

}  // namespace cadd::stats

#endif  // CADD_STATS_TESTS_H_
