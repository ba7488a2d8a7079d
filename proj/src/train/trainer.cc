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

#include "cadd/train/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "cadd/common/error.h"
#include "cadd/common/hash.h"
#include "cadd/common/io.h"
#include "cadd/common/random.h"
#include "cadd/nn/ops.h"

namespace cadd::train {

double TrainConfig::DefaultLr(nn::BackboneKind kind) { return kind == nn::BackboneKind::kRawNet3 ? 1e-3 : 1e-4; }

double TrainConfig::DefaultWeightDecay(nn::BackboneKind kind) {
  return kind == nn::BackboneKind::kRawNet3 ? 5e-5 : 1e-4;
}

TrainConfig TrainConfig::Defaults(nn::BackboneKind kind, Variant variant) {
  TrainConfig c;
  c.backbone = nn::BackboneSpec::For(kind);
  c.variant = variant;
  c.lr = DefaultLr(kind);
  c.weight_decay = DefaultWeightDecay(kind);
  return c;
}

void TrainConfig::Validate() const {
  backbone.Validate();
  if (!(lr >= 0.0) || !(weight_decay >= 0.0)) throw ValidationError("lr and weight_decay must be >= 0");
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (epochs < 1) throw ValidationError("epochs must be >= 1");
  if (seeds.empty()) throw ValidationError("at least one seed is required");
}

std::vector<std::string> TrainConfig::Overrides() const {
  const TrainConfig d = Defaults(backbone.kind, variant);
  std::vector<std::string> out;
  auto note = [&](const std::string& field, const nlohmann::json& got, const nlohmann::json& want) {
    if (got != want) out.push_back(field + "=" + got.dump() + " (default " + want.dump() + ")");
  };
  note("lr", lr, d.lr);
  note("weight_decay", weight_decay, d.weight_decay);
  note("batch_size", batch_size, d.batch_size);
  note("epochs", epochs, d.epochs);
  note("seeds", seeds, d.seeds);
  return out;
}

nlohmann::json TrainConfig::ToJson() const {
  return {{"backbone", backbone.ToJson()}, {"variant", VariantName(variant)}, {"lr", lr},
          {"weight_decay", weight_decay},  {"batch_size", batch_size},     {"epochs", epochs},
          {"seeds", seeds}};
}

std::string TrainConfig::Hash() const { return HexDigest(Fnv1a64(ToJson().dump())); }

TrainConfig TrainConfig::FromJson(const nlohmann::json& j) {
  nn::BackboneSpec spec;
  if (j.contains("backbone") && j.at("backbone").is_object()) {
    spec = nn::BackboneSpec::FromJson(j.at("backbone"));
  } else {
    spec = nn::BackboneSpec::For(nn::ParseBackboneKind(j.value("backbone", std::string("lcnn"))));
  }
  TrainConfig c = Defaults(spec.kind, ParseVariant(j.value("variant", std::string("T+C"))));
  c.backbone = spec;
  c.lr = j.value("lr", c.lr);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.epochs = j.value("epochs", c.epochs);
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  c.Validate();
  return c;
}

Adam::Adam(nn::NamedTensors params, double lr, double weight_decay, double beta1, double beta2, double eps)
    : lr_(lr), weight_decay_(weight_decay), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (auto& p : params) {
    if (!p.second->requires_grad) continue;
    m_.emplace_back(p.second->numel(), 0.0);
    v_.emplace_back(p.second->numel(), 0.0);
    params_.push_back(std::move(p));
  }
}

void Adam::Step() {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    nn::Node& p = *params_[k].second;
    const double* g = p.mutable_grad();
    std::vector<double>& m = m_[k];
    std::vector<double>& v = v_[k];
    for (std::size_t i = 0; i < p.numel(); ++i) {
      const double gi = g[i] + weight_decay_ * p.value[i];
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * gi;
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * gi * gi;
      p.value[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
    }
  }
}

void Adam::ZeroGrad() {
  for (auto& p : params_) p.second->ZeroGrad();
}

void ExampleSet::Add(const std::string& id, std::span<const double> audio_row, std::span<const double> side_row,
                     double label) {
  if (audio_row.size() != sample_size()) {
    throw ValidationError(id + ": audio input has " + std::to_string(audio_row.size()) + " values, expected " +
                          std::to_string(sample_size()));
  }
  if (side_row.size() != static_cast<std::size_t>(side_width)) {
    throw ValidationError(id + ": side input has " + std::to_string(side_row.size()) + " values, expected " +
                          std::to_string(side_width));
  }
  ids.push_back(id);
  audio.insert(audio.end(), audio_row.begin(), audio_row.end());
  side.insert(side.end(), side_row.begin(), side_row.end());
  labels.push_back(label);
}

nn::Tensor ExampleSet::AudioBatch(std::span<const std::size_t> rows) const {
  const std::size_t n = sample_size();
  std::vector<double> v(rows.size() * n);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy_n(audio.begin() + static_cast<long>(rows[r] * n), n, v.begin() + static_cast<long>(r * n));
  }
  nn::Shape shape{static_cast<int>(rows.size())};
  shape.insert(shape.end(), sample_shape.begin(), sample_shape.end());
  return nn::MakeTensor(std::move(shape), std::move(v));
}

nn::Tensor ExampleSet::SideBatch(std::span<const std::size_t> rows) const {
  if (side_width == 0) return nullptr;
  const std::size_t n = static_cast<std::size_t>(side_width);
  std::vector<double> v(rows.size() * n);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy_n(side.begin() + static_cast<long>(rows[r] * n), n, v.begin() + static_cast<long>(r * n));
  }
  return nn::MakeTensor({static_cast<int>(rows.size()), side_width}, std::move(v));
}

ExampleSet ExampleSet::Select(const std::vector<std::string>& wanted) const {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = i;
  ExampleSet out;
  out.sample_shape = sample_shape;
  out.side_width = side_width;
  const std::size_t n = sample_size(), s = static_cast<std::size_t>(side_width);
  for (const auto& id : wanted) {
    auto it = index.find(id);
    if (it == index.end()) throw ValidationError("unknown example id " + id);
    const std::size_t i = it->second;
    out.Add(id, std::span<const double>(audio).subspan(i * n, n), std::span<const double>(side).subspan(i * s, s),
            labels[i]);
  }
  return out;
}

std::vector<double> PredictAll(nn::CaddModel& model, const ExampleSet& set, std::size_t chunk) {
  std::vector<double> out;
  out.reserve(set.size());
  std::vector<std::size_t> rows;
  for (std::size_t start = 0; start < set.size(); start += chunk) {
    rows.resize(std::min(chunk, set.size() - start));
    std::iota(rows.begin(), rows.end(), start);
    const auto p = model.Predict(set.AudioBatch(rows), set.SideBatch(rows));
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

double MeanLoss(nn::CaddModel& model, const ExampleSet& set) {
  if (set.size() == 0) return std::numeric_limits<double>::quiet_NaN();
  const auto p = PredictAll(model, set);
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += nn::Bce(set.labels[i], p[i]);
  return total / static_cast<double>(p.size());
}

double Accuracy(nn::CaddModel& model, const ExampleSet& set, double threshold) {
  if (set.size() == 0) throw ValidationError("accuracy of an empty set");
  const auto p = PredictAll(model, set);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < p.size(); ++i) hits += ((p[i] >= threshold) == (set.labels[i] > 0.5)) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(p.size());
}

eval::EvalReport Evaluate(nn::CaddModel& model, const ExampleSet& set, double threshold) {
  const auto p = PredictAll(model, set);
  std::vector<eval::ScoredSample> scored;
  for (std::size_t i = 0; i < p.size(); ++i) {
    scored.push_back(eval::ScoredSample::Make(set.ids[i], set.labels[i] > 0.5 ? 1 : 0, p[i]));
  }
  return eval::ComputeMetrics(std::move(scored), threshold);
}

namespace {

std::vector<std::vector<double>> Snapshot(const nn::CaddModel& model) {
  std::vector<std::vector<double>> out;
  for (const auto& [name, t] : model.StateDict()) out.push_back(t->value);
  return out;
}

void Restore(nn::CaddModel& model, const std::vector<std::vector<double>>& state) {
  const auto dict = model.StateDict();
  for (std::size_t i = 0; i < dict.size(); ++i) dict[i].second->value = state[i];
}

}  // namespace

TrainRun TrainOne(const TrainConfig& config, std::uint64_t seed, const ExampleSet& train, const ExampleSet& val,
                  const data::LeakageGuard* guard) {
  config.Validate();
  if (train.size() == 0) throw ValidationError("empty training set");
  if (guard != nullptr) guard->CheckFitIds(train.ids, "training");
  const bool needs_side = config.variant != Variant::kBaseline;
  if (needs_side && train.side_width != nn::kContextInputWidth) {
    throw ValidationError("variant " + std::string(VariantName(config.variant)) + " needs " +
                          std::to_string(nn::kContextInputWidth) + "-wide side inputs");
  }

  TrainRun run;
  run.seed = seed;
  run.model = std::make_unique<nn::CaddModel>(config.backbone, config.variant, seed);
  nn::CaddModel& model = *run.model;
  Adam adam(model.NamedParameters(), config.lr, config.weight_decay);
  Rng shuffle(Mix64(seed ^ 0x5eed5eed5eedULL));

  run.initial_train_loss = MeanLoss(model, train);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best_state;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle.Shuffle(std::span<std::size_t>(order));
    model.SetTraining(true);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t n = std::min<std::size_t>(config.batch_size, order.size() - start);
      const std::span<const std::size_t> rows(order.data() + start, n);
      std::vector<double> labels(n);
      for (std::size_t i = 0; i < n; ++i) labels[i] = train.labels[rows[i]];
      adam.ZeroGrad();
      nn::Tensor loss = nn::BceLoss(model.Forward(train.AudioBatch(rows), train.SideBatch(rows)), labels);
      if (!std::isfinite(loss->value[0])) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch starting at " +
                            std::to_string(start) + " (seed " + std::to_string(seed) + ", lr " +
                            std::to_string(config.lr) + ")");
      }
      nn::Backward(loss);
      adam.Step();
      loss_sum += loss->value[0] * static_cast<double>(n);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.val_loss = MeanLoss(model, val);
    if (!std::isfinite(rec.train_loss)) throw TrainingError("non-finite training loss at epoch " + std::to_string(epoch));
    run.curve.push_back(rec);
    if (val.size() > 0 && rec.val_loss < best_val) {
      best_val = rec.val_loss;
      best_state = Snapshot(model);
      run.selected_epoch = epoch;
    }
  }
  if (best_state.empty()) {
    run.selection = "final_epoch";
    run.selected_epoch = config.epochs;
  } else {
    run.selection = "best_val_loss";
    Restore(model, best_state);
  }
  model.SetTraining(false);
  run.final_train_loss = MeanLoss(model, train);
  return run;
}

std::string LossCurveCsv(const std::vector<EpochRecord>& curve) {
  std::string out = "epoch,train_loss,val_loss\n";
  char buf[96];
  for (const auto& r : curve) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", r.epoch, r.train_loss, r.val_loss);
    out += buf;
  }
  return out;
}

AveragedResult TrainAveraged(const TrainConfig& config, const ExampleSet& train, const ExampleSet& val,
                             const ExampleSet& test, const std::filesystem::path& out_dir,
                             const data::LeakageGuard* guard, const nlohmann::json& extra_config) {
  config.Validate();
  for (const auto& o : config.Overrides()) LogInfo("train: override " + o);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    nlohmann::json cfg = config.ToJson();
    cfg["config_hash"] = config.Hash();
    cfg["overrides"] = config.Overrides();
    if (!extra_config.is_null()) cfg["experiment"] = extra_config;
    WriteJsonFile(out_dir / "config.json", cfg);
  }
  AveragedResult result;
  std::vector<eval::EvalReport> reports;
  for (std::uint64_t seed : config.seeds) {
    SeedResult sr;
    sr.seed = seed;
    try {
      sr.run = TrainOne(config, seed, train, val, guard);
    } catch (const Error& e) {
      throw TrainingError("seed " + std::to_string(seed) + " failed: " + e.what() +
                          (out_dir.empty() ? "" : " (completed seeds kept in " + out_dir.string() + ")"));
    }
    LogInfo("train: seed " + std::to_string(seed) + " selected epoch " + std::to_string(sr.run.selected_epoch) +
            " by " + sr.run.selection);
    sr.report = Evaluate(*sr.run.model, test);
    if (!out_dir.empty()) {
      const auto dir = out_dir / ("seed_" + std::to_string(seed));
      std::filesystem::create_directories(dir);
      nn::SaveCheckpoint(dir / "model.ckpt", *sr.run.model, config.Hash(),
                         {{"selected_epoch", sr.run.selected_epoch}, {"selection", sr.run.selection}});
      WriteFileAtomic(dir / "loss_curve.csv", LossCurveCsv(sr.run.curve));
      eval::WriteReport(dir, std::string(VariantName(config.variant)), sr.report);
    }
    reports.push_back(sr.report);
    result.per_seed.push_back(std::move(sr));
  }
  result.mean = eval::MeanReport(reports);
  if (!out_dir.empty()) eval::WriteReport(out_dir, std::string(VariantName(config.variant)), result.mean);
  return result;
}

}  // namespace cadd::train
