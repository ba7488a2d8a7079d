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
#include <array>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "cadd/common/error.h"
#include "cadd/common/random.h"
#include "cadd/data/dataset.h"

namespace cadd::data {

using nlohmann::json;

namespace {

struct ClassPools {
  // Index 0 real, 1 fake; ids in manifest order.
  std::array<std::vector<std::string>, 2> ids;
};

ClassPools GroupByClass(const DatasetManifest& manifest) {
  ClassPools pools;
  for (const auto& s : manifest.samples()) pools.ids[static_cast<int>(s.label)].push_back(s.id);
  return pools;
}

// Distributes `total` over classes proportionally to `weights` using largest
// remainder, never exceeding `capacity` for any class.
std::array<std::size_t, 2> Apportion(std::size_t total, const std::array<std::size_t, 2>& weights,
                                     const std::array<std::size_t, 2>& capacity,
                                     std::array<double, 2>& cumulative_gain) {
  const double w_sum = static_cast<double>(weights[0] + weights[1]);
  std::array<std::size_t, 2> out{};
  std::array<double, 2> frac{};
  std::size_t assigned = 0;
  for (int c = 0; c < 2; ++c) {
    const double quota = static_cast<double>(total) * static_cast<double>(weights[c]) / w_sum;
    out[c] = std::min<std::size_t>(static_cast<std::size_t>(std::floor(quota + 1e-9)), capacity[c]);
    frac[c] = quota - static_cast<double>(out[c]);
    assigned += out[c];
  }
  while (assigned < total) {
    int best = -1;
    for (int c = 0; c < 2; ++c) {
      if (out[c] >= capacity[c]) continue;
      if (best < 0 || frac[c] > frac[best] + 1e-12 ||
          (std::abs(frac[c] - frac[best]) <= 1e-12 && cumulative_gain[c] < cumulative_gain[best])) {
        best = c;
      }
    }
    if (best < 0) throw ValidationError("split apportioning exceeded class capacity");
    ++out[best];
    frac[best] -= 1.0;
    cumulative_gain[best] += 1.0;
    ++assigned;
  }
  return out;
}

}  // namespace

SplitAssignment StratifiedSplit(const DatasetManifest& manifest, const SplitFractions& fractions,
                                std::uint64_t seed) {
  if (fractions.train < 0 || fractions.val < 0 || fractions.test < 0) {
    throw ValidationError("split fractions must be non-negative");
  }
  if (std::abs(fractions.train + fractions.val + fractions.test - 1.0) > 1e-9) {
    throw ValidationError("split fractions must sum to 1");
  }
  ClassPools pools = GroupByClass(manifest);
  for (int c = 0; c < 2; ++c) {
    if (pools.ids[c].empty()) {
      throw ValidationError(std::string("class '") + std::string(LabelName(static_cast<Label>(c))) +
                            "' has no samples");
    }
  }

  const std::size_t n = manifest.size();
  const auto n_train = static_cast<std::size_t>(std::floor(fractions.train * n + 1e-9));
  const auto n_val = static_cast<std::size_t>(std::floor(fractions.val * n + 1e-9));

  const std::array<std::size_t, 2> class_n{pools.ids[0].size(), pools.ids[1].size()};
  std::array<double, 2> gain{};
  const auto train_c = Apportion(n_train, class_n, class_n, gain);
  const std::array<std::size_t, 2> left{class_n[0] - train_c[0], class_n[1] - train_c[1]};
  const auto val_c = Apportion(n_val, class_n, left, gain);

  Rng rng(seed);
  SplitAssignment split;
  split.seed = seed;
  for (int c = 0; c < 2; ++c) {
    auto& ids = pools.ids[c];
    rng.Shuffle(std::span<std::string>(ids));
    auto it = ids.begin();
    split.train_ids.insert(split.train_ids.end(), it, it + train_c[c]);
    it += train_c[c];
    split.val_ids.insert(split.val_ids.end(), it, it + val_c[c]);
    it += val_c[c];
    split.test_ids.insert(split.test_ids.end(), it, ids.end());
  }
  return split;
}

std::vector<Fold> StratifiedKFold(const DatasetManifest& manifest, int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("k must be at least 2");
  ClassPools pools = GroupByClass(manifest);
  for (int c = 0; c < 2; ++c) {
    if (pools.ids[c].size() < static_cast<std::size_t>(k)) {
      throw ValidationError(std::string("class '") + std::string(LabelName(static_cast<Label>(c))) +
                            "' has fewer than k samples");
    }
  }
  Rng rng(seed);
  std::vector<std::vector<std::string>> test(k);
  std::size_t offset = 0;
  for (int c = 0; c < 2; ++c) {
    auto& ids = pools.ids[c];
    rng.Shuffle(std::span<std::string>(ids));
    // Continue dealing where the previous class stopped so fold sizes stay
    // balanced overall as well as per class.
    for (std::size_t i = 0; i < ids.size(); ++i) test[(offset + i) % k].push_back(ids[i]);
    offset = (offset + ids.size()) % k;
  }

  std::vector<Fold> folds(k);
  for (int f = 0; f < k; ++f) {
    std::unordered_set<std::string> in_test(test[f].begin(), test[f].end());
    for (const auto& s : manifest.samples()) {
      if (!in_test.count(s.id)) folds[f].train_ids.push_back(s.id);
    }
    folds[f].test_ids = std::move(test[f]);
  }
  return folds;
}

json SplitToJson(const SplitAssignment& split) {
  return json{{"seed", split.seed},
              {"train", split.train_ids},
              {"val", split.val_ids},
              {"test", split.test_ids}};
}

SplitAssignment SplitFromJson(const json& j) {
  try {
    SplitAssignment s;
    s.seed = j.value("seed", std::uint64_t{0});
    s.train_ids = j.at("train").get<std::vector<std::string>>();
    s.val_ids = j.at("val").get<std::vector<std::string>>();
    s.test_ids = j.at("test").get<std::vector<std::string>>();
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed split: ") + e.what());
  }
}

void ValidateSplit(const SplitAssignment& split, const DatasetManifest& manifest) {
  std::unordered_set<std::string> seen;
  for (const auto* ids : {&split.train_ids, &split.val_ids, &split.test_ids}) {
    for (const auto& id : *ids) {
      if (!manifest.Find(id)) throw ValidationError("split references unknown id: " + id);
      if (!seen.insert(id).second) throw ValidationError("id in more than one split: " + id);
    }
  }
  if (seen.size() != manifest.size()) {
    throw ValidationError("split does not cover every manifest id");
  }
}

}  // namespace cadd::data
