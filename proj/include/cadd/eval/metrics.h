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

#ifndef CADD_EVAL_METRICS_H_
#define CADD_EVAL_METRICS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace cadd::eval {

// y = 1 marks a fake sample; p is the model's fake probability.
struct ScoredSample {
  std::string id;
  int y = 0;
  double p = 0.0;
  double abs_error = 0.0;  // |y - p|

  static ScoredSample Make(std::string id, int y, double p);
};

// All percentages, 0..100.
struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvalReport {
  ClassMetrics real;
  ClassMetrics fake;
  ClassMetrics weighted;
  std::optional<double> auc;
  std::optional<double> eer;
  std::optional<double> avg;
  double threshold = 0.5;
  std::vector<ScoredSample> scored;

  nlohmann::json ToJson() const;
  static EvalReport FromJson(const nlohmann::json& j);
};

double AvgScore(double auc, double f1_fake, double eer);

// Both return percentages; they throw ValidationError unless both classes
// are present.
double RankAuc(const std::vector<ScoredSample>& scored);
double PairwiseAuc(const std::vector<ScoredSample>& scored);
double EqualErrorRate(const std::vector<ScoredSample>& scored);

EvalReport ComputeMetrics(std::vector<ScoredSample> scored, double threshold = 0.5);

// Mean of every scalar metric. Per-sample scores are averaged by id when
// all reports cover the same ids.
EvalReport MeanReport(const std::vector<EvalReport>& reports);

std::string ReportCsvHeader();
std::string ReportCsvRow(const std::string& label, const EvalReport& report);
void WriteReport(const std::filesystem::path& dir, const std::string& label, const EvalReport& report);

// Avg-score deltas (perturbed - clean, percentage points); rows are
// perturbations, columns are model configurations. ToCsv appends a mean row.
class DegradationTable {
 public:
  void AddColumn(const std::string& config, const EvalReport& clean,
                 const std::vector<std::pair<std::string, EvalReport>>& perturbed);
  const std::vector<std::string>& rows() const { return rows_; }
  const std::vector<std::string>& columns() const { return columns_; }
  double Delta(const std::string& row, const std::string& column) const;
  double MeanDelta(const std::string& column) const;
  std::string ToCsv() const;

 private:
  std::vector<std::string> rows_;
  std::vector<std::string> columns_;
  std::map<std::pair<std::string, std::string>, double> deltas_;
};

}  // namespace cadd::eval

#endif  // CADD_EVAL_METRICS_H_
