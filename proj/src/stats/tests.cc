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

#include "cadd/stats/tests.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "cadd/common/error.h"

namespace cadd::stats {

namespace {

void RequireNonEmpty(std::span<const double> a, std::span<const double> b, const char* op) {
  if (a.empty() || b.empty()) throw ValidationError(std::string(op) + ": both samples must be non-empty");
  for (auto s : {a, b}) {
    for (double v : s) {
      if (!std::isfinite(v)) throw ValidationError(std::string(op) + ": non-finite value");
    }
  }
}

struct Ranked {
  std::vector<long> doubled;  // doubled midrank per pooled element, a first
  double tie_term = 0.0;      // sum of t^3 - t over tie groups
};

Ranked DoubledMidranks(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size() + b.size();
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
  Ranked r;
  r.doubled.resize(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    // 1-based positions i+1..j+1 share the midrank (i+j+2)/2.
    for (std::size_t k = i; k <= j; ++k) r.doubled[order[k]] = static_cast<long>(i + j + 2);
    const double t = static_cast<double>(j - i + 1);
    r.tie_term += t * t * t - t;
    i = j + 1;
  }
  return r;
}

double NormalCdf(double z) { return boost::math::cdf(boost::math::normal(), z); }

}  // namespace

Alternative ParseAlternative(std::string_view text) {
  if (text == "less") return Alternative::kLess;
  if (text == "greater") return Alternative::kGreater;
  if (text == "two-sided" || text == "two_sided") return Alternative::kTwoSided;
  throw ValidationError("unknown alternative: " + std::string(text));
}

MwuResult MannWhitneyU(std::span<const double> a, std::span<const double> b, Alternative alt, MwuMethod method) {
  RequireNonEmpty(a, b, "mann-whitney");
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;
  const Ranked ranked = DoubledMidranks(a, b);
  long s_a = 0;
  for (std::size_t i = 0; i < na; ++i) s_a += ranked.doubled[i];

  MwuResult r;
  r.u = static_cast<double>(s_a) / 2.0 - static_cast<double>(na * (na + 1)) / 2.0;
  const bool exact = method == MwuMethod::kExact ||
                     (method == MwuMethod::kAuto && std::min(na, nb) <= kExactMaxN && n <= kExactMaxTotal);
  r.exact = exact;

  double p_less, p_greater;
  if (exact) {
    // Distribution of the doubled rank sum of the smaller group over all
    // equally likely subsets.
    const bool a_small = na <= nb;
    const std::size_t k = a_small ? na : nb;
    long total = 0;
    for (long d : ranked.doubled) total += d;
    const auto max_sum = static_cast<std::size_t>(2 * n * k);
    std::vector<std::vector<double>> count(k + 1, std::vector<double>(max_sum + 1, 0.0));
    count[0][0] = 1.0;
    for (std::size_t item = 0; item < n; ++item) {
      const auto d = static_cast<std::size_t>(ranked.doubled[item]);
      for (std::size_t m = std::min(k, item + 1); m >= 1; --m) {
        const auto& from = count[m - 1];
        auto& to = count[m];
        for (std::size_t s = d; s <= max_sum; ++s) to[s] += from[s - d];
      }
    }
    const auto& dist = count[k];
    const double subsets = std::accumulate(dist.begin(), dist.end(), 0.0);
    // Probability that the small group's sum lies in [lo, hi].
    auto mass = [&](long lo, long hi) {
      double acc = 0.0;
      for (long s = std::max(lo, 0L); s <= std::min<long>(hi, static_cast<long>(max_sum)); ++s) acc += dist[s];
      return acc / subsets;
    };
    const long obs = a_small ? s_a : total - s_a;
    const double small_le = mass(0, obs), small_ge = mass(obs, static_cast<long>(max_sum));
    p_less = a_small ? small_le : small_ge;
    p_greater = a_small ? small_ge : small_le;
  } else {
    const double mu = static_cast<double>(na) * nb / 2.0;
    const double nn = static_cast<double>(n);
    const double var = static_cast<double>(na) * nb / 12.0 * ((nn + 1.0) - ranked.tie_term / (nn * (nn - 1.0)));
    if (var <= 0.0) {
      p_less = p_greater = 1.0;
    } else {
      const double sd = std::sqrt(var);
      p_less = NormalCdf((r.u + 0.5 - mu) / sd);
      p_greater = 1.0 - NormalCdf((r.u - 0.5 - mu) / sd);
    }
  }
  switch (alt) {
    case Alternative::kLess:
      r.p = p_less;
      break;
    case Alternative::kGreater:
      r.p = p_greater;
      break;
    case Alternative::kTwoSided:
      r.p = 2.0 * std::min(p_less, p_greater);
      break;
  }
  r.p = std::clamp(r.p, 0.0, 1.0);
  return r;
}

double Mean(std::span<const double> values) {
  if (values.empty()) throw ValidationError("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double Median(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

TTestResult IndependentTTest(std::span<const double> a, std::span<const double> b) {
  RequireNonEmpty(a, b, "t-test");
  if (a.size() + b.size() < 3) throw ValidationError("t-test: needs at least 3 observations");
  const double ma = Mean(a), mb = Mean(b);
  double ss = 0.0;
  for (double v : a) ss += (v - ma) * (v - ma);
  for (double v : b) ss += (v - mb) * (v - mb);
  TTestResult r;
  r.df = static_cast<double>(a.size() + b.size() - 2);
  const double se = std::sqrt(ss / r.df * (1.0 / a.size() + 1.0 / b.size()));
  if (se == 0.0) {
    r.t = ma == mb ? 0.0 : std::copysign(INFINITY, ma - mb);
    r.p = ma == mb ? 1.0 : 0.0;
    return r;
  }
  r.t = (ma - mb) / se;
  r.p = 2.0 * boost::math::cdf(boost::math::complement(boost::math::students_t(r.df), std::abs(r.t)));
  r.p = std::min(1.0, r.p);
  return r;
}

std::vector<double> BenjaminiHochberg(std::span<const double> p) {
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("benjamini-hochberg: p-value out of [0, 1]");
  }
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return p[i] < p[j]; });
  std::vector<double> adjusted(m);
  double running = 1.0;
  for (std::size_t r = m; r >= 1; --r) {
    const std::size_t i = order[r - 1];
    running = std::min(running, p[i] * (static_cast<double>(m) / static_cast<double>(r)));
    adjusted[i] = running;
  }
  return adjusted;
}

std::string Stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "--";
}

nlohmann::json ErrorComparison::ToJson() const {
  return {{"name", name},
          {"n", n},
          {"baseline_median_abs_error", baseline_median},
          {"cadd_median_abs_error", cadd_median},
          {"u", u},
          {"p", p},
          {"p_two_sided", p_two_sided},
          {"p_adjusted", p_adjusted},
          {"stars", stars()},
          {"exact", exact},
          {"direction", direction}};
}

ErrorComparison CompareErrors(const std::vector<eval::ScoredSample>& baseline,
                              const std::vector<eval::ScoredSample>& cadd, std::string name) {
  auto by_id = [](const std::vector<eval::ScoredSample>& s) {
    std::map<std::string, double> m;
    for (const auto& x : s) {
      if (!m.emplace(x.id, x.abs_error).second) throw ValidationError("duplicate id in scores: " + x.id);
    }
    return m;
  };
  const auto base = by_id(baseline), ours = by_id(cadd);
  if (base.size() != ours.size()) throw ValidationError("error comparison: id mismatch (different sizes)");
  std::vector<double> eb, ec;
  for (const auto& [id, e] : base) {
    auto it = ours.find(id);
    if (it == ours.end()) throw ValidationError("error comparison: id mismatch at " + id);
    eb.push_back(e);
    ec.push_back(it->second);
  }
  if (eb.empty()) throw ValidationError("error comparison: no samples");

  ErrorComparison c;
  c.name = std::move(name);
  c.n = eb.size();
  c.baseline_median = Median(eb);
  c.cadd_median = Median(ec);
  const auto less = MannWhitneyU(ec, eb, Alternative::kLess);
  c.u = less.u;
  c.p = less.p;
  c.exact = less.exact;
  c.p_two_sided = MannWhitneyU(ec, eb, Alternative::kTwoSided).p;
  c.p_adjusted = c.p;
  const double centre = static_cast<double>(c.n) * static_cast<double>(c.n) / 2.0;
  c.direction = c.u < centre ? "cadd_lower" : c.u > centre ? "cadd_higher" : "none";
  return c;
}

namespace {

template <typename T>
void AdjustP(std::vector<T>& family) {
  std::vector<double> p;
  for (const auto& c : family) p.push_back(c.p);
  const auto adj = BenjaminiHochberg(p);
  for (std::size_t i = 0; i < family.size(); ++i) family[i].p_adjusted = adj[i];
}

}  // namespace

void AdjustFamily(std::vector<ErrorComparison>& family) { AdjustP(family); }
void AdjustFamily(std::vector<GroupComparison>& family) { AdjustP(family); }

nlohmann::json GroupComparison::ToJson() const {
  return {{"name", name},       {"group_a", group_a},   {"group_b", group_b},       {"n_a", n_a},
          {"n_b", n_b},         {"median_a", median_a}, {"median_b", median_b},     {"p", p},
          {"p_adjusted", p_adjusted}, {"stars", stars()}};
}

GroupComparison CompareCategories(const std::vector<eval::ScoredSample>& scored,
                                  const std::map<std::string, std::string>& category_of_id, const std::string& group_a,
                                  const std::string& group_b, std::string name) {
  // group_b may be "*" for "every category other than group_a".
  std::vector<double> a, b;
  for (const auto& s : scored) {
    auto it = category_of_id.find(s.id);
    if (it == category_of_id.end()) continue;
    if (it->second == group_a) {
      a.push_back(s.abs_error);
    } else if (group_b == "*" || it->second == group_b) {
      b.push_back(s.abs_error);
    }
  }
  if (a.empty() || b.empty()) {
    throw ValidationError("category comparison: no samples for " + (a.empty() ? group_a : group_b));
  }
  GroupComparison c;
  c.name = std::move(name);
  c.group_a = group_a;
  c.group_b = group_b;
  c.n_a = a.size();
  c.n_b = b.size();
  c.median_a = Median(a);
  c.median_b = Median(b);
  c.p = MannWhitneyU(a, b, Alternative::kTwoSided).p;
  c.p_adjusted = c.p;
  return c;
}

}  // namespace cadd::stats
