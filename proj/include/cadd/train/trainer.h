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

#ifndef CADD_TRAIN_TRAINER_H_
#define CADD_TRAIN_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cadd/common/variant.h"
#include "cadd/data/dataset.h"
#include "cadd/eval/metrics.h"
#include "cadd/nn/cadd_model.h"
#include "json.hpp"

namespace cadd::train {

struct TrainConfig {
  nn::BackboneSpec backbone = nn::BackboneSpec::For(nn::BackboneKind::kLcnn);
  Variant variant = Variant::kTPlusC;
  double lr = 1e-4;
  double weight_decay = 1e-4;
  int batch_size = 16;
  int epochs = 30;
  std::vector<std::uint64_t> seeds{0, 1, 2};

  static TrainConfig Defaults(nn::BackboneKind kind, Variant variant);
  static double DefaultLr(nn::BackboneKind kind);
  static double DefaultWeightDecay(nn::BackboneKind kind);

  void Validate() const;
  // Human-readable list of fields that differ from Defaults().
  std::vector<std::string> Overrides() const;
  std::string Hash() const;

  nlohmann::json ToJson() const;
  // Missing fields take the per-backbone defaults.
  static TrainConfig FromJson(const nlohmann::json& j);
};

// Adam with L2 weight decay folded into the gradient.
class Adam {
 public:
  Adam(nn::NamedTensors params, double lr, double weight_decay, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);
  void Step();
  void ZeroGrad();
  long steps() const { return t_; }

 private:
  nn::NamedTensors params_;
  double lr_, weight_decay_, beta1_, beta2_, eps_;
  std::vector<std::vector<double>> m_, v_;
  long t_ = 0;
};

// Model-ready examples: one flattened audio input per row plus the
// optional 100-wide side vector.
struct ExampleSet {
  nn::Shape sample_shape;
  int side_width = 0;
  std::vector<std::string> ids;
  std::vector<double> audio;
  std::vector<double> side;
  std::vector<double> labels;

  std::size_t size() const { return ids.size(); }
  std::size_t sample_size() const { return nn::NumElements(sample_shape); }
  void Add(const std::string& id, std::span<const double> audio_row, std::span<const double> side_row, double label);
  nn::Tensor AudioBatch(std::span<const std::size_t> rows) const;
  nn::Tensor SideBatch(std::span<const std::size_t> rows) const;  // null when side_width == 0
  ExampleSet Select(const std::vector<std::string>& wanted) const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;  // NaN when there is no validation data
};

struct TrainRun {
  std::unique_ptr<nn::CaddModel> model;  // selected checkpoint
  std::uint64_t seed = 0;
  int selected_epoch = 0;
  std::string selection;  // "best_val_loss" or "final_epoch"
  std::vector<EpochRecord> curve;
  double initial_train_loss = 0.0;
  double final_train_loss = 0.0;
};

// Eval-mode probabilities, chunked.
std::vector<double> PredictAll(nn::CaddModel& model, const ExampleSet& set, std::size_t chunk = 64);
double MeanLoss(nn::CaddModel& model, const ExampleSet& set);
double Accuracy(nn::CaddModel& model, const ExampleSet& set, double threshold = 0.5);
eval::EvalReport Evaluate(nn::CaddModel& model, const ExampleSet& set, double threshold = 0.5);

// Trains one seed. The guard, when given, must admit every training id.
TrainRun TrainOne(const TrainConfig& config, std::uint64_t seed, const ExampleSet& train, const ExampleSet& val,
                  const data::LeakageGuard* guard = nullptr);

struct SeedResult {
  std::uint64_t seed = 0;
  eval::EvalReport report;
  TrainRun run;
};

struct AveragedResult {
  std::vector<SeedResult> per_seed;
  eval::EvalReport mean;
};

// Runs every configured seed and reports on `test`. When out_dir is set,
// writes config.json, seed_<s>/{model.ckpt,loss_curve.csv,report.json} and
// the mean report.json; artifacts of completed seeds survive a failure.
AveragedResult TrainAveraged(const TrainConfig& config, const ExampleSet& train, const ExampleSet& val,
                             const ExampleSet& test, const std::filesystem::path& out_dir = {},
                             const data::LeakageGuard* guard = nullptr, const nlohmann::json& extra_config = {});

std::string LossCurveCsv(const std::vector<EpochRecord>& curve);

}  // namespace cadd::train

#endif  // CADD_TRAIN_TRAINER_H_
