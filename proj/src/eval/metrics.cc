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

#include "cadd/eval/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "cadd/common/error.h"
#include "cadd/common/io.h"

namespace cadd::eval {

namespace {

struct ClassCounts {
  std::size_t real = 0;
  std::size_t fake = 0;
};

ClassCounts Count(const std::vector<ScoredSample>& scored) {
  ClassCounts c;
  for (const auto& s : scored) (s.y == 1 ? c.fake : c.real)++;
  return c;
}

void RequireBothClasses(const std::vector<ScoredSample>& scored, const char* what) {
  const ClassCounts c = Count(scored);
  if (c.real == 0 || c.fake == 0) throw ValidationError(std::string(what) + " needs both classes");
}

double Ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

ClassMetrics Make(double tp, double fp, double fn, std::size_t support) {
  ClassMetrics m;
  const double p = Ratio(tp, tp + fp);
  const double r = Ratio(tp, tp + fn);
  m.precision = 100.0 * p;
  m.recall = 100.0 * r;
  m.f1 = 100.0 * Ratio(2.0 * p * r, p + r);
  m.support = support;
  return m;
}

nlohmann::json ClassJson(const ClassMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
}

ClassMetrics ClassFromJson(const nlohmann::json& j) {
  return {j.at("precision").get<double>(), j.at("recall").get<double>(), j.at("f1").get<double>(),
          j.value("support", std::size_t{0})};
}

nlohmann::json Optional(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

std::optional<double> OptionalFrom(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

ScoredSample ScoredSample::Make(std::string id, int y, double p) {
  if (y != 0 && y != 1) throw ValidationError("label must be 0 or 1 for " + id);
  return {std::move(id), y, p, std::abs(static_cast<double>(y) - p)};
}

double AvgScore(double auc, double f1_fake, double eer) { return (auc + f1_fake + (100.0 - eer)) / 3.0; }

double RankAuc(const std::vector<ScoredSample>& scored) {
  RequireBothClasses(scored, "AUC");
  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scored[a].p < scored[b].p; });
  // Twice the fake rank sum, using midranks for ties, stays integral.
  long long twice_rank_sum = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scored[order[j]].p == scored[order[i]].p) ++j;
    const long long twice_midrank = static_cast<long long>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (scored[order[k]].y == 1) twice_rank_sum += twice_midrank;
    }
    i = j;
  }
  const ClassCounts c = Count(scored);
  const long long nf = static_cast<long long>(c.fake);
  const long long twice_u = twice_rank_sum - nf * (nf + 1);
  return 100.0 * static_cast<double>(twice_u) / (2.0 * static_cast<double>(c.fake * c.real));
}

double PairwiseAuc(const std::vector<ScoredSample>& scored) {
  RequireBothClasses(scored, "AUC");
  long long twice_correct = 0;
  for (const auto& f : scored) {
    if (f.y != 1) continue;
    for (const auto& r : scored) {
      if (r.y != 0) continue;
      twice_correct += f.p > r.p ? 2 : (f.p == r.p ? 1 : 0);
    }
  }
  const ClassCounts c = Count(scored);
  return 100.0 * static_cast<double>(twice_correct) / (2.0 * static_cast<double>(c.fake * c.real));
}

double EqualErrorRate(const std::vector<ScoredSample>& scored) {
  RequireBothClasses(scored, "EER");
  const ClassCounts c = Count(scored);
  std::vector<ScoredSample> sorted = scored;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.p > b.p; });
  // Walk the ROC from the strictest threshold; at each vertex a sample is
  // flagged fake when p >= threshold.
  double fpr = 0.0, fnr = 1.0;
  std::size_t fp = 0, tp = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].p == sorted[i].p) {
      (sorted[j].y == 1 ? tp : fp)++;
      ++j;
    }
    const double next_fpr = static_cast<double>(fp) / c.real;
    const double next_fnr = 1.0 - static_cast<double>(tp) / c.fake;
    const double d0 = fnr - fpr;
    const double d1 = next_fnr - next_fpr;
    if (d1 <= 0.0) {
      const double alpha = d0 / (d0 - d1);
      return 100.0 * (fpr + alpha * (next_fpr - fpr));
    }
    fpr = next_fpr;
    fnr = next_fnr;
    i = j;
  }
  return 100.0 * fpr;  // unreachable: the last vertex has fnr = 0, fpr = 1
}

EvalReport ComputeMetrics(std::vector<ScoredSample> scored, double threshold) {
  if (scored.empty()) throw ValidationError("no scored samples");
  double tp = 0, fp = 0, fn = 0, tn = 0;
  for (auto& s : scored) {
    s.abs_error = std::abs(static_cast<double>(s.y) - s.p);
    const bool flagged = s.p >= threshold;
    if (s.y == 1) {
      (flagged ? tp : fn) += 1;
    } else {
      (flagged ? fp : tn) += 1;
    }
  }
  EvalReport r;
  r.threshold = threshold;
  r.fake = Make(tp, fp, fn, static_cast<std::size_t>(tp + fn));
  r.real = Make(tn, fn, fp, static_cast<std::size_t>(tn + fp));
  const double n = static_cast<double>(scored.size());
  const double wr = r.real.support / n, wf = r.fake.support / n;
  r.weighted.precision = wr * r.real.precision + wf * r.fake.precision;
  r.weighted.recall = wr * r.real.recall + wf * r.fake.recall;
  r.weighted.f1 = wr * r.real.f1 + wf * r.fake.f1;
  r.weighted.support = scored.size();
  if (r.real.support > 0 && r.fake.support > 0) {
    r.auc = RankAuc(scored);
    r.eer = EqualErrorRate(scored);
    r.avg = AvgScore(*r.auc, r.fake.f1, *r.eer);
  }
  r.scored = std::move(scored);
  return r;
}

EvalReport MeanReport(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw ValidationError("mean of zero reports");
  const double k = static_cast<double>(reports.size());
  EvalReport m;
  m.threshold = reports.front().threshold;
  auto mean_class = [&](auto member) {
    ClassMetrics out;
    for (const auto& r : reports) {
      const ClassMetrics& c = r.*member;
      out.precision += c.precision / k;
      out.recall += c.recall / k;
      out.f1 += c.f1 / k;
      out.support = c.support;
    }
    return out;
  };
  m.real = mean_class(&EvalReport::real);
  m.fake = mean_class(&EvalReport::fake);
  m.weighted = mean_class(&EvalReport::weighted);
  auto mean_opt = [&](auto member) -> std::optional<double> {
    double total = 0.0;
    for (const auto& r : reports) {
      if (!(r.*member)) return std::nullopt;
      total += *(r.*member);
    }
    return total / k;
  };
  m.auc = mean_opt(&EvalReport::auc);
  m.eer = mean_opt(&EvalReport::eer);
  m.avg = mean_opt(&EvalReport::avg);

  std::map<std::string, std::pair<int, double>> by_id;
  for (const auto& s : reports.front().scored) by_id[s.id] = {s.y, 0.0};
  bool aligned = true;
  for (const auto& r : reports) {
    if (r.scored.size() != by_id.size()) aligned = false;
    for (const auto& s : r.scored) {
      auto it = by_id.find(s.id);
      if (it == by_id.end()) {
        aligned = false;
        break;
      }
      it->second.second += s.p / k;
    }
  }
  if (aligned) {
    for (const auto& s : reports.front().scored) {
      const auto& [y, p] = by_id[s.id];
      m.scored.push_back(ScoredSample::Make(s.id, y, p));
    }
  }
  return m;
}

nlohmann::json EvalReport::ToJson() const {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : scored) samples.push_back({{"id", s.id}, {"y", s.y}, {"p", s.p}, {"abs_error", s.abs_error}});
  return {{"real", ClassJson(real)}, {"fake", ClassJson(fake)}, {"weighted", ClassJson(weighted)},
          {"auc", Optional(auc)},    {"eer", Optional(eer)},     {"avg", Optional(avg)},
          {"threshold", threshold},  {"eer_method", "roc_linear_interpolation"}, {"scored", samples}};
}

EvalReport EvalReport::FromJson(const nlohmann::json& j) {
  EvalReport r;
  r.real = ClassFromJson(j.at("real"));
  r.fake = ClassFromJson(j.at("fake"));
  r.weighted = ClassFromJson(j.at("weighted"));
  r.auc = OptionalFrom(j, "auc");
  r.eer = OptionalFrom(j, "eer");
  r.avg = OptionalFrom(j, "avg");
  r.threshold = j.value("threshold", 0.5);
  for (const auto& s : j.value("scored", nlohmann::json::array())) {
    r.scored.push_back(ScoredSample::Make(s.at("id").get<std::string>(), s.at("y").get<int>(), s.at("p").get<double>()));
  }
  return r;
}

std::string ReportCsvHeader() {
  return "config,real_p,real_r,real_f1,fake_p,fake_r,fake_f1,weighted_p,weighted_r,weighted_f1,auc,eer,avg\n";
}

std::string ReportCsvRow(const std::string& label, const EvalReport& r) {
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  auto opt = [&](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
  std::string row = label;
  for (const ClassMetrics* c : {&r.real, &r.fake, &r.weighted}) {
    row += "," + fmt(c->precision) + "," + fmt(c->recall) + "," + fmt(c->f1);
  }
  return row + "," + opt(r.auc) + "," + opt(r.eer) + "," + opt(r.avg) + "\n";
}

void WriteReport(const std::filesystem::path& dir, const std::string& label, const EvalReport& report) {
  std::filesystem::create_directories(dir);
  WriteJsonFile(dir / "report.json", report.ToJson());
  WriteFileAtomic(dir / "report.csv", ReportCsvHeader() + ReportCsvRow(label, report));
}

namespace {

std::set<std::string> Ids(const EvalReport& r) {
  std::set<std::string> ids;
  for (const auto& s : r.scored) ids.insert(s.id);
  return ids;
}

}  // namespace

void DegradationTable::AddColumn(const std::string& config, const EvalReport& clean,
                                 const std::vector<std::pair<std::string, EvalReport>>& perturbed) {
  if (!clean.avg) throw ValidationError(config + ": clean report has no Avg score");
  if (std::find(columns_.begin(), columns_.end(), config) != columns_.end()) {
    throw ValidationError("duplicate configuration " + config);
  }
  std::vector<std::string> names;
  for (const auto& [name, rep] : perturbed) names.push_back(name);
  if (columns_.empty()) {
    rows_ = names;
  } else if (names != rows_) {
    throw ValidationError(config + ": perturbation rows differ from the first column");
  }
  const std::set<std::string> clean_ids = Ids(clean);
  for (const auto& [name, rep] : perturbed) {
    if (Ids(rep) != clean_ids) throw ValidationError(config + "/" + name + ": test ids differ from the clean report");
    if (!rep.avg) throw ValidationError(config + "/" + name + ": report has no Avg score");
    deltas_[{name, config}] = *rep.avg - *clean.avg;
  }
  columns_.push_back(config);
}

double DegradationTable::Delta(const std::string& row, const std::string& column) const {
  auto it = deltas_.find({row, column});
  if (it == deltas_.end()) throw ValidationError("no delta for " + row + "/" + column);
  return it->second;
}

double DegradationTable::MeanDelta(const std::string& column) const {
  if (rows_.empty()) throw ValidationError("empty degradation table");
  double total = 0.0;
  for (const auto& r : rows_) total += Delta(r, column);
  return total / static_cast<double>(rows_.size());
}

std::string DegradationTable::ToCsv() const {
  std::string out = "perturbation";
  for (const auto& c : columns_) out += "," + c;
  out += "\n";
  char buf[32];
  for (const auto& r : rows_) {
    out += r;
    for (const auto& c : columns_) {
      std::snprintf(buf, sizeof buf, ",%.2f", Delta(r, c));
      out += buf;
    }
    out += "\n";
  }
  if (!rows_.empty()) {
    out += "mean";
    for (const auto& c : columns_) {
      std::snprintf(buf, sizeof buf, ",%.2f", MeanDelta(c));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace cadd::eval
