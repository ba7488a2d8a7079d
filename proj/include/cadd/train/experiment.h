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

#ifndef CADD_TRAIN_EXPERIMENT_H_
#define CADD_TRAIN_EXPERIMENT_H_

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cadd/audio/feature_set.h"
#include "cadd/context/providers.h"
#include "cadd/data/dataset.h"
#include "cadd/text/context_features.h"
#include "cadd/text/embedding.h"
#include "cadd/text/pipeline.h"
#include "cadd/train/trainer.h"
#include "json.hpp"

namespace cadd::train {

// Which concrete providers back the feature extraction steps.
struct ProviderConfig {
  std::string context_mode = "stub";  // stub | live | none
  std::filesystem::path context_fixtures;
  std::filesystem::path context_cache;
  std::string embedder = "hash";  // hash | command
  std::uint64_t embedder_seed = 0;
  std::string embedder_command;
  std::string encoder = "random_projection";  // random_projection | command
  std::uint64_t encoder_seed = 0;
  int encoder_width = 32;
  std::string encoder_command;
  std::string asr_command;
  std::filesystem::path feature_cache;

  nlohmann::json ToJson() const;
  static ProviderConfig FromJson(const nlohmann::json& j, const std::filesystem::path& base_dir);
};

// Full experiment description: data, features, model, optimizer, providers.
struct ExperimentConfig {
  std::string name = "experiment";
  std::filesystem::path manifest;
  std::filesystem::path split_file;  // computed from split_seed when empty
  std::uint64_t split_seed = 0;
  data::SplitFractions fractions;
  audio::FeatureSetSpec features;
  TrainConfig train;
  ProviderConfig providers;
  std::filesystem::path out_dir;

  nlohmann::json ToJson() const;
  // Relative paths resolve against base_dir.
  static ExperimentConfig FromJson(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
};

// Owns the providers named by a ProviderConfig.
class ExperimentContext {
 public:
  explicit ExperimentContext(const ProviderConfig& config);

  const text::EmbeddingProvider& embedder() const { return *embedder_; }
  const audio::SpeechEncoderProvider* encoder() const { return encoder_.get(); }
  const text::AsrProvider* asr() const { return asr_.get(); }
  audio::FeatureExtractor extractor() const;
  const audio::FeatureCache* feature_cache() const { return feature_cache_.get(); }
  // Context bundle for a sample, honoring its publish date as cutoff.
  context::ContextBundle Context(const data::AudioSample& sample);
  bool has_context() const { return providers_.profile || providers_.news || providers_.social; }

 private:
  std::unique_ptr<text::EmbeddingProvider> embedder_;
  std::unique_ptr<audio::SpeechEncoderProvider> encoder_;
  std::unique_ptr<text::AsrProvider> asr_;
  std::unique_ptr<audio::FeatureCache> feature_cache_;
  std::unique_ptr<context::ContextCache> context_cache_;
  context::ProviderSet providers_;
};

// Fills in the feature geometry implied by the feature set.
nn::BackboneSpec ResolveSpec(const nn::BackboneSpec& spec, const audio::FeatureSetSpec& features,
                             const ExperimentContext& ctx);

// Crops or tiles `rows` rows of width `width` to exactly `target` rows.
std::vector<double> FitRows(const std::vector<double>& values, std::size_t width, std::size_t target);

// Per-sample inputs that need no fitting: model-ready audio rows and the
// raw side vectors (empty for the baseline).
struct RawInputs {
  std::map<std::string, std::vector<double>> audio;
  std::map<std::string, Eigen::VectorXd> side;
};

RawInputs ComputeRawInputs(const nn::BackboneSpec& spec, Variant variant, const audio::FeatureSetSpec& features,
                           const data::DatasetManifest& manifest, ExperimentContext& ctx);

// Fits normalization + PCA on the given ids only.
text::FeaturePipeline FitSidePipeline(Variant variant, const RawInputs& raw, const std::vector<std::string>& fit_ids,
                                      const data::LeakageGuard* guard);

ExampleSet BuildExamples(const nn::BackboneSpec& spec, Variant variant, const data::DatasetManifest& manifest,
                         const std::vector<std::string>& ids, const RawInputs& raw,
                         const text::FeaturePipeline* pipeline);

// Trains every seed on the split and writes the run directory:
// config.json, split.json, pipeline.json, seed_<s>/..., report.json/.csv.
AveragedResult RunExperiment(const ExperimentConfig& config);

struct CrossValidationResult {
  std::vector<eval::EvalReport> folds;
  eval::EvalReport mean;
};

// k stratified folds; each fold trains on the rest with no validation
// subset (final-epoch selection) and reports the seed-mean on its fold.
CrossValidationResult RunCrossValidation(const ExperimentConfig& config, int k);

// Scores a manifest with every seed checkpoint of a run directory and
// returns the seed-mean report.
eval::EvalReport EvaluateRun(const std::filesystem::path& run_dir, const std::filesystem::path& manifest_path,
                             const ProviderConfig* providers_override = nullptr);

}  // namespace cadd::train

#endif  // CADD_TRAIN_EXPERIMENT_H_
