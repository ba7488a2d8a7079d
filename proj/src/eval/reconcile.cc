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

#include "cadd/eval/reconcile.h"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "cadd/common/error.h"
#include "cadd/common/io.h"
#include "cadd/eval/metrics.h"

namespace cadd::eval {

namespace {

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t Column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw ParseError("missing column " + name);
  }
};

Table ReadCsv(const std::filesystem::path& path) {
  std::stringstream in(ReadTextFile(path));
  Table t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = SplitCsv(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
    } else if (cells.size() != t.header.size()) {
      throw ParseError(path.string() + " line " + std::to_string(line_no) + ": expected " +
                       std::to_string(t.header.size()) + " cells");
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

std::optional<double> Number(const std::string& cell) {
  if (cell.empty() || cell == "-" || cell == "--") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw ParseError("bad number " + cell);
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("bad number " + cell);
  }
}

bool InScope(const PublishedRow& row, const std::string& scope) {
  if (scope == "Baseline") return row.variant == "Baseline";
  if (scope == "CADD") return row.variant.rfind("CADD", 0) == 0;
  throw ValidationError("unknown extremum scope " + scope);
}

std::string Fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", Round2(v));
  return buf;
}

}  // namespace

double Round2(double v) {
  // Formatting with extra digits first avoids binary artefacts such as
  // 87.434999999 for a decimal 87.435.
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return std::round(std::stod(buf) * 100.0) / 100.0;
}

double PublishedRow::Avg() const {
  if (!complete()) throw ValidationError(Key() + ": incomplete row");
  return AvgScore(*auc, *f1_fake, *eer);
}

std::vector<PublishedRow> LoadPublishedTables(const std::filesystem::path& csv) {
  const Table t = ReadCsv(csv);
  const std::size_t ds = t.Column("dataset"), model = t.Column("model"), variant = t.Column("variant"),
                    auc = t.Column("auc"), f1 = t.Column("fake_f1"), eer = t.Column("eer");
  std::vector<PublishedRow> rows;
  for (const auto& r : t.rows) rows.push_back({r[ds], r[model], r[variant], Number(r[auc]), Number(r[f1]), Number(r[eer])});
  return rows;
}

std::vector<AvgClaim> LoadClaims(const std::filesystem::path& csv) {
  const Table t = ReadCsv(csv);
  std::vector<AvgClaim> claims;
  for (const auto& r : t.rows) {
    const auto v = Number(r[t.Column("value")]);
    if (!v) throw ParseError("claim without a value");
    claims.push_back({r[t.Column("claim")], *v, r[t.Column("dataset")], r[t.Column("model")], r[t.Column("variant")],
                      r[t.Column("extremum_scope")]});
  }
  return claims;
}

Reconciliation Reconcile(std::vector<PublishedRow> rows, const std::vector<AvgClaim>& claims) {
  Reconciliation out;
  out.rows = std::move(rows);
  for (const auto& claim : claims) {
    const PublishedRow* source = nullptr;
    for (const auto& r : out.rows) {
      if (r.dataset == claim.dataset && r.model == claim.model && r.variant == claim.variant) source = &r;
    }
    if (source == nullptr || !source->complete()) {
      throw ValidationError("claim " + claim.name + ": no complete row " + claim.dataset + "/" + claim.model + "/" +
                            claim.variant);
    }
    ClaimCheck check;
    check.claim = claim;
    check.recomputed = source->Avg();
    check.matches = Round2(check.recomputed) == Round2(claim.value);
    check.group_max = -1.0;
    for (const auto& r : out.rows) {
      if (r.dataset != claim.dataset || !r.complete() || !InScope(r, claim.extremum_scope)) continue;
      if (r.Avg() > check.group_max) {
        check.group_max = r.Avg();
        check.group_max_row = r.Key();
      }
    }
    check.is_group_max = check.group_max_row == source->Key();
    out.claims.push_back(check);
  }
  return out;
}

bool Reconciliation::ok() const {
  for (const auto& c : claims) {
    if (!c.matches) return false;
  }
  return !claims.empty();
}

std::string Reconciliation::ToCsv() const {
  std::string out = "dataset,model,variant,auc,fake_f1,eer,avg\n";
  for (const auto& r : rows) {
    if (!r.complete()) continue;
    out += r.dataset + "," + r.model + "," + r.variant + "," + Fixed2(*r.auc) + "," + Fixed2(*r.f1_fake) + "," +
           Fixed2(*r.eer) + "," + Fixed2(r.Avg()) + "\n";
  }
  return out;
}

nlohmann::json Reconciliation::ToJson() const {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : claims) {
    checks.push_back({{"claim", c.claim.name},
                      {"stated", c.claim.value},
                      {"row", c.claim.dataset + "/" + c.claim.model + "/" + c.claim.variant},
                      {"recomputed", c.recomputed},
                      {"matches", c.matches},
                      {"scope", c.claim.dataset + " " + c.claim.extremum_scope},
                      {"scope_max_row", c.group_max_row},
                      {"scope_max", c.group_max},
                      {"is_scope_max", c.is_group_max}});
  }
  std::size_t complete = 0;
  for (const auto& r : rows) complete += r.complete() ? 1 : 0;
  return {{"rows", rows.size()}, {"complete_rows", complete}, {"claims", checks}, {"ok", ok()}};
}

}  // namespace cadd::eval
