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

#ifndef CADD_EVAL_RECONCILE_H_
#define CADD_EVAL_RECONCILE_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace cadd::eval {

// One row of a published results table, percentages as printed.
struct PublishedRow {
  std::string dataset;
  std::string model;
  std::string variant;
  std::optional<double> auc;
  std::optional<double> f1_fake;
  std::optional<double> eer;

  bool complete() const { return auc && f1_fake && eer; }
  double Avg() const;
  std::string Key() const { return dataset + "/" + model + "/" + variant; }
};

// A stated Avg value tied to the row it was computed from. The scope
// names the group ("Baseline" or "CADD" within the dataset) over which
// the claim is also checked as a maximum.
struct AvgClaim {
  std::string name;
  double value = 0.0;
  std::string dataset;
  std::string model;
  std::string variant;
  std::string extremum_scope;
};

struct ClaimCheck {
  AvgClaim claim;
  double recomputed = 0.0;
  bool matches = false;  // equal at 2 decimals
  std::string group_max_row;
  double group_max = 0.0;
  bool is_group_max = false;
};

struct Reconciliation {
  std::vector<PublishedRow> rows;
  std::vector<ClaimCheck> claims;

  bool ok() const;
  std::string ToCsv() const;
  nlohmann::json ToJson() const;
};

std::vector<PublishedRow> LoadPublishedTables(const std::filesystem::path& csv);
std::vector<AvgClaim> LoadClaims(const std::filesystem::path& csv);
Reconciliation Reconcile(std::vector<PublishedRow> rows, const std::vector<AvgClaim>& claims);

// Rounds half away from zero at 2 decimals, on the decimal representation.
double Round2(double v);

}  // namespace cadd::eval

#endif  // CADD_EVAL_RECONCILE_H_
