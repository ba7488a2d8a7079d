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

#ifndef CADD_DATA_DATASET_H_
#define CADD_DATA_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cadd/common/date.h"
#include "json.hpp"

namespace cadd::data {

inline constexpr int kCanonicalSampleRate = 16000;

enum class Label { kReal = 0, kFake = 1 };

std::string_view LabelName(Label label);
Label ParseLabel(std::string_view text);

struct AudioSample {
  std::string id;
  std::filesystem::path audio_path;
  int sample_rate = kCanonicalSampleRate;
  Label label = Label::kReal;
  std::string subject;
  // Absent for sources without dates (e.g. ITW); context acquisition
  // decides the fallback cutoff.
  std::optional<Date> publish_date;
  std::optional<std::string> transcript;
  std::string source_tag;
  // Generation method of synthetic samples; empty (and omitted on disk) otherwise.
  std::string method;

  bool has_publish_date() const { return publish_date.has_value(); }
};

class DatasetManifest {
 public:
  DatasetManifest() = default;
  // Throws ValidationError("duplicate id: <id>") on duplicate ids.
  DatasetManifest(std::string name, std::vector<AudioSample> samples);

  const std::string& name() const { return name_; }
  const std::vector<AudioSample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  const AudioSample* Find(std::string_view id) const;
  const AudioSample& At(std::string_view id) const;
  std::vector<std::string> Ids() const;
  std::size_t CountLabel(Label label) const;

  void Add(AudioSample sample);

  // Keeps the manifest's order; ids must all exist.
  DatasetManifest Subset(const std::vector<std::string>& ids, std::string name) const;

 private:
  std::string name_;
  std::vector<AudioSample> samples_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct ManifestLoadOptions {
  // Fail when an audio_path does not exist on disk.
  bool check_audio_exists = true;
};

// One JSON object per line; relative audio paths resolve against the
// manifest's directory. Blank lines are skipped.
DatasetManifest LoadManifest(const std::filesystem::path& path,
                             const ManifestLoadOptions& options = {});
DatasetManifest ParseManifest(std::string_view text, std::string name,
                              const std::filesystem::path& base_dir,
                              const ManifestLoadOptions& options = {});
nlohmann::json SampleToJson(const AudioSample& sample,
                            const std::filesystem::path& relative_to = {});
void SaveManifest(const DatasetManifest& manifest, const std::filesystem::path& path);

struct SplitFractions {
  double train = 0.7;
  double val = 0.1;
  double test = 0.2;
};

struct SplitAssignment {
  std::vector<std::string> train_ids;
  std::vector<std::string> val_ids;
  std::vector<std::string> test_ids;
  std::uint64_t seed = 0;

  bool operator==(const SplitAssignment&) const = default;
};

// Global split sizes are floor(f * n) for train and val with the remainder
// to test; each split's size is then apportioned over the classes by
// largest remainder so per-class counts stay within one of proportional.
SplitAssignment StratifiedSplit(const DatasetManifest& manifest, const SplitFractions& fractions,
                                std::uint64_t seed);

struct Fold {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

std::vector<Fold> StratifiedKFold(const DatasetManifest& manifest, int k, std::uint64_t seed);

nlohmann::json SplitToJson(const SplitAssignment& split);
SplitAssignment SplitFromJson(const nlohmann::json& j);
// Checks disjointness and coverage of the manifest ids.
void ValidateSplit(const SplitAssignment& split, const DatasetManifest& manifest);

// Rejects any id outside the training split from reaching a fit operation
// (normalization, PCA, training batches).
class LeakageGuard {
 public:
  explicit LeakageGuard(const std::vector<std::string>& fit_ids);
  void CheckFitIds(const std::vector<std::string>& ids, std::string_view operation) const;

 private:
  std::unordered_map<std::string, bool> allowed_;
};

}  // namespace cadd::data

#endif  // CADD_DATA_DATASET_H_
