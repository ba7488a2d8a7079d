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

#include "cadd/train/experiment.h"

#include <algorithm>

#include "cadd/audio/wav.h"
#include "cadd/common/error.h"
#include "cadd/common/hash.h"
#include "cadd/common/io.h"

namespace cadd::train {

namespace fs = std::filesystem;

namespace {

fs::path Resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::string PathString(const fs::path& p) { return p.empty() ? std::string() : fs::absolute(p).string(); }

}  // namespace

nlohmann::json ProviderConfig::ToJson() const {
  return {{"context_mode", context_mode},
          {"context_fixtures", PathString(context_fixtures)},
          {"context_cache", PathString(context_cache)},
          {"embedder", embedder},
          {"embedder_seed", embedder_seed},
          {"embedder_command", embedder_command},
          {"encoder", encoder},
          {"encoder_seed", encoder_seed},
          {"encoder_width", encoder_width},
          {"encoder_command", encoder_command},
          {"asr_command", asr_command},
          {"feature_cache", PathString(feature_cache)}};
}

ProviderConfig ProviderConfig::FromJson(const nlohmann::json& j, const fs::path& base_dir) {
  ProviderConfig c;
  c.context_mode = j.value("context_mode", c.context_mode);
  if (c.context_mode != "stub" && c.context_mode != "live" && c.context_mode != "none") {
    throw ValidationError("context_mode must be stub, live or none");
  }
  c.context_fixtures = Resolve(base_dir, j.value("context_fixtures", std::string()));
  c.context_cache = Resolve(base_dir, j.value("context_cache", std::string()));
  c.embedder = j.value("embedder", c.embedder);
  c.embedder_seed = j.value("embedder_seed", c.embedder_seed);
  c.embedder_command = j.value("embedder_command", std::string());
  c.encoder = j.value("encoder", c.encoder);
  c.encoder_seed = j.value("encoder_seed", c.encoder_seed);
  c.encoder_width = j.value("encoder_width", c.encoder_width);
  c.encoder_command = j.value("encoder_command", std::string());
  c.asr_command = j.value("asr_command", std::string());
  c.feature_cache = Resolve(base_dir, j.value("feature_cache", std::string()));
  return c;
}

nlohmann::json ExperimentConfig::ToJson() const {
  nlohmann::json j = train.ToJson();
  j["name"] = name;
  j["manifest"] = PathString(manifest);
  j["split_file"] = PathString(split_file);
  j["split_seed"] = split_seed;
  j["fractions"] = {fractions.train, fractions.val, fractions.test};
  j["feature_set"] = features.ToString();
  j["providers"] = providers.ToJson();
  j["out_dir"] = PathString(out_dir);
  return j;
}

ExperimentConfig ExperimentConfig::FromJson(const nlohmann::json& j, const fs::path& base_dir) {
  ExperimentConfig c;
  nlohmann::json train_json = j;
  // Backbone geometry may be given next to the kind for brevity.
  if (j.contains("backbone") && j.at("backbone").is_string()) {
    nn::BackboneSpec spec = nn::BackboneSpec::For(nn::ParseBackboneKind(j.at("backbone").get<std::string>()));
    spec.channels = j.value("channels", spec.channels);
    spec.input_frames = j.value("input_frames", spec.input_frames);
    spec.raw_samples = j.value("raw_samples", spec.raw_samples);
    train_json["backbone"] = spec.ToJson();
  }
  c.train = TrainConfig::FromJson(train_json);
  c.name = j.value("name", c.name);
  c.manifest = Resolve(base_dir, j.value("manifest", std::string()));
  c.split_file = Resolve(base_dir, j.value("split_file", std::string()));
  c.split_seed = j.value("split_seed", c.split_seed);
  if (j.contains("fractions")) {
    const auto f = j.at("fractions").get<std::vector<double>>();
    if (f.size() != 3) throw ValidationError("fractions must have 3 entries");
    c.fractions = {f[0], f[1], f[2]};
  }
  c.features = audio::FeatureSetSpec::Parse(j.value("feature_set", std::string("lfcc")));
  c.providers = ProviderConfig::FromJson(j.value("providers", nlohmann::json::object()), base_dir);
  c.out_dir = Resolve(base_dir, j.value("out_dir", std::string()));
  return c;
}

ExperimentContext::ExperimentContext(const ProviderConfig& config) {
  if (config.embedder == "hash") {
    embedder_ = std::make_unique<text::HashEmbedder>(config.embedder_seed);
  } else if (config.embedder == "command") {
    embedder_ = std::make_unique<text::ExternalCommandEmbedder>(config.embedder_command, text::kEmbeddingDim);
  } else {
    throw ValidationError("unknown embedder " + config.embedder);
  }
  if (config.encoder == "random_projection") {
    encoder_ = std::make_unique<audio::RandomProjectionEncoder>(config.encoder_seed, config.encoder_width);
  } else if (config.encoder == "command") {
    encoder_ = std::make_unique<audio::ExternalCommandEncoder>(config.encoder_command, config.encoder_width);
  } else if (config.encoder != "none") {
    throw ValidationError("unknown encoder " + config.encoder);
  }
  if (!config.asr_command.empty()) asr_ = std::make_unique<text::ExternalCommandAsr>(config.asr_command);
  if (!config.feature_cache.empty()) feature_cache_ = std::make_unique<audio::FeatureCache>(config.feature_cache);
  if (!config.context_cache.empty()) context_cache_ = std::make_unique<context::ContextCache>(config.context_cache);
  if (config.context_mode == "stub") {
    if (config.context_fixtures.empty()) throw ValidationError("stub context needs context_fixtures");
    providers_ = context::MakeStubProviders(config.context_fixtures);
  } else if (config.context_mode == "live") {
    providers_ = context::MakeLiveProviders(context::LiveEndpoints{});
  }
}

audio::FeatureExtractor ExperimentContext::extractor() const {
  audio::FeatureExtractor fx;
  fx.encoder = encoder_.get();
  return fx;
}

context::ContextBundle ExperimentContext::Context(const data::AudioSample& sample) {
  if (!has_context()) throw ValidationError("context features requested but context_mode is none");
  return context::FetchContext(sample.subject, sample.publish_date, providers_, context_cache_.get());
}

nn::BackboneSpec ResolveSpec(const nn::BackboneSpec& spec, const audio::FeatureSetSpec& features,
                             const ExperimentContext& ctx) {
  nn::BackboneSpec out = spec;
  if (!out.raw_audio()) out.feature_width = ctx.extractor().Width(features);
  out.Validate();
  return out;
}

std::vector<double> FitRows(const std::vector<double>& values, std::size_t width, std::size_t target) {
  if (width == 0 || values.empty() || values.size() % width != 0) {
    throw ValidationError("cannot fit " + std::to_string(values.size()) + " values into rows of " +
                          std::to_string(width));
  }
  const std::size_t rows = values.size() / width;
  std::vector<double> out(target * width);
  for (std::size_t r = 0; r < target; ++r) {
    std::copy_n(values.begin() + static_cast<long>((r % rows) * width), width,
                out.begin() + static_cast<long>(r * width));
  }
  return out;
}

RawInputs ComputeRawInputs(const nn::BackboneSpec& spec, Variant variant, const audio::FeatureSetSpec& features,
                           const data::DatasetManifest& manifest, ExperimentContext& ctx) {
  RawInputs raw;
  const audio::FeatureExtractor fx = ctx.extractor();
  const std::string key = fx.Key(features);
  for (const auto& s : manifest.samples()) {
    if (spec.raw_audio()) {
      const audio::Waveform w = audio::ReadWav(s.audio_path);
      raw.audio[s.id] = FitRows(w.samples, 1, spec.raw_samples);
    } else {
      const std::string cache_id = s.id + "-" + HexDigest(Fnv1a64(s.audio_path.string()));
      std::optional<Eigen::MatrixXd> m;
      if (ctx.feature_cache()) m = ctx.feature_cache()->Get(cache_id, key);
      if (!m) {
        m = fx.Compute(audio::ReadWav(s.audio_path), features);
        if (ctx.feature_cache()) ctx.feature_cache()->Put(cache_id, key, *m);
      }
      const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = *m;
      raw.audio[s.id] = FitRows(std::vector<double>(rm.data(), rm.data() + rm.size()), rm.cols(), spec.input_frames);
    }
    if (variant == Variant::kBaseline) continue;
    Eigen::VectorXd t, c;
    if (UsesTranscript(variant)) t = text::TranscriptVector(s, ctx.asr(), ctx.embedder());
    if (UsesContext(variant)) c = text::AssembleContextVector(ctx.Context(s), ctx.embedder());
    raw.side[s.id] = text::RawFeatureVector(variant, t, c);
  }
  return raw;
}

text::FeaturePipeline FitSidePipeline(Variant variant, const RawInputs& raw, const std::vector<std::string>& fit_ids,
                                      const data::LeakageGuard* guard) {
  if (guard != nullptr) guard->CheckFitIds(fit_ids, "side-input normalization");
  const auto schema = text::ContextFeatureSchema::ForVariant(variant);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(fit_ids.size()), schema.width());
  for (std::size_t i = 0; i < fit_ids.size(); ++i) {
    auto it = raw.side.find(fit_ids[i]);
    if (it == raw.side.end()) throw ValidationError("no side input for " + fit_ids[i]);
    x.row(static_cast<Eigen::Index>(i)) = it->second.transpose();
  }
  text::FeaturePipeline p(schema.Signature(), nn::kContextInputWidth);
  p.Fit(x, fit_ids, guard);
  return p;
}

ExampleSet BuildExamples(const nn::BackboneSpec& spec, Variant variant, const data::DatasetManifest& manifest,
                         const std::vector<std::string>& ids, const RawInputs& raw,
                         const text::FeaturePipeline* pipeline) {
  ExampleSet set;
  set.sample_shape = spec.SampleShape();
  set.side_width = variant == Variant::kBaseline ? 0 : nn::kContextInputWidth;
  if (set.side_width > 0 && pipeline == nullptr) throw ValidationError("side inputs need a fitted pipeline");
  for (const auto& id : ids) {
    const auto& a = raw.audio.at(id);
    const double label = manifest.At(id).label == data::Label::kFake ? 1.0 : 0.0;
    if (set.side_width == 0) {
      set.Add(id, a, {}, label);
    } else {
      const Eigen::VectorXd v = pipeline->Transform(raw.side.at(id));
      set.Add(id, a, std::span<const double>(v.data(), static_cast<std::size_t>(v.size())), label);
    }
  }
  return set;
}

namespace {

data::SplitAssignment LoadOrMakeSplit(const ExperimentConfig& config, const data::DatasetManifest& manifest) {
  data::SplitAssignment split = config.split_file.empty()
                                    ? data::StratifiedSplit(manifest, config.fractions, config.split_seed)
                                    : data::SplitFromJson(ReadJsonFile(config.split_file));
  data::ValidateSplit(split, manifest);
  return split;
}

}  // namespace

AveragedResult RunExperiment(const ExperimentConfig& config) {
  const data::DatasetManifest manifest = data::LoadManifest(config.manifest);
  const data::SplitAssignment split = LoadOrMakeSplit(config, manifest);
  ExperimentContext ctx(config.providers);
  TrainConfig tc = config.train;
  tc.backbone = ResolveSpec(tc.backbone, config.features, ctx);
  const RawInputs raw = ComputeRawInputs(tc.backbone, tc.variant, config.features, manifest, ctx);

  const data::LeakageGuard guard(split.train_ids);
  std::unique_ptr<text::FeaturePipeline> pipeline;
  if (tc.variant != Variant::kBaseline) {
    pipeline = std::make_unique<text::FeaturePipeline>(FitSidePipeline(tc.variant, raw, split.train_ids, &guard));
  }
  const ExampleSet train = BuildExamples(tc.backbone, tc.variant, manifest, split.train_ids, raw, pipeline.get());
  const ExampleSet val = BuildExamples(tc.backbone, tc.variant, manifest, split.val_ids, raw, pipeline.get());
  const ExampleSet test = BuildExamples(tc.backbone, tc.variant, manifest, split.test_ids, raw, pipeline.get());

  if (!config.out_dir.empty()) {
    fs::create_directories(config.out_dir);
    WriteJsonFile(config.out_dir / "split.json", data::SplitToJson(split));
    if (pipeline) pipeline->Save(config.out_dir / "pipeline.json");
  }
  ExperimentConfig resolved = config;
  resolved.train = tc;
  return TrainAveraged(tc, train, val, test, config.out_dir, &guard, resolved.ToJson());
}

CrossValidationResult RunCrossValidation(const ExperimentConfig& config, int k) {
  const data::DatasetManifest manifest = data::LoadManifest(config.manifest);
  ExperimentContext ctx(config.providers);
  TrainConfig tc = config.train;
  tc.backbone = ResolveSpec(tc.backbone, config.features, ctx);
  const RawInputs raw = ComputeRawInputs(tc.backbone, tc.variant, config.features, manifest, ctx);
  const auto folds = data::StratifiedKFold(manifest, k, config.split_seed);

  CrossValidationResult result;
  ExperimentConfig resolved = config;
  resolved.train = tc;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const data::LeakageGuard guard(folds[f].train_ids);
    std::unique_ptr<text::FeaturePipeline> pipeline;
    if (tc.variant != Variant::kBaseline) {
      pipeline =
          std::make_unique<text::FeaturePipeline>(FitSidePipeline(tc.variant, raw, folds[f].train_ids, &guard));
    }
    const ExampleSet train = BuildExamples(tc.backbone, tc.variant, manifest, folds[f].train_ids, raw, pipeline.get());
    const ExampleSet test = BuildExamples(tc.backbone, tc.variant, manifest, folds[f].test_ids, raw, pipeline.get());
    ExampleSet none;
    none.sample_shape = train.sample_shape;
    none.side_width = train.side_width;
    const fs::path dir = config.out_dir.empty() ? fs::path() : config.out_dir / ("fold_" + std::to_string(f));
    if (!dir.empty()) {
      fs::create_directories(dir);
      if (pipeline) pipeline->Save(dir / "pipeline.json");
    }
    result.folds.push_back(TrainAveraged(tc, train, none, test, dir, &guard, resolved.ToJson()).mean);
  }
  result.mean = eval::MeanReport(result.folds);
  if (!config.out_dir.empty()) {
    eval::WriteReport(config.out_dir, std::string(VariantName(tc.variant)), result.mean);
    std::string csv = eval::ReportCsvHeader();
    for (std::size_t f = 0; f < result.folds.size(); ++f) csv += eval::ReportCsvRow("fold_" + std::to_string(f), result.folds[f]);
    csv += eval::ReportCsvRow("mean", result.mean);
    WriteFileAtomic(config.out_dir / "folds.csv", csv);
  }
  return result;
}

eval::EvalReport EvaluateRun(const fs::path& run_dir, const fs::path& manifest_path,
                             const ProviderConfig* providers_override) {
  const nlohmann::json cfg = ReadJsonFile(run_dir / "config.json");
  if (!cfg.contains("experiment")) throw ValidationError(run_dir.string() + ": config.json has no experiment section");
  const ExperimentConfig exp = ExperimentConfig::FromJson(cfg.at("experiment"));
  ExperimentContext ctx(providers_override ? *providers_override : exp.providers);
  const data::DatasetManifest manifest = data::LoadManifest(manifest_path);

  std::vector<fs::path> checkpoints;
  for (const auto& entry : fs::directory_iterator(run_dir)) {
    if (entry.is_directory() && entry.path().filename().string().rfind("seed_", 0) == 0 &&
        fs::exists(entry.path() / "model.ckpt")) {
      checkpoints.push_back(entry.path() / "model.ckpt");
    }
  }
  std::sort(checkpoints.begin(), checkpoints.end());
  if (checkpoints.empty()) throw ValidationError(run_dir.string() + ": no seed checkpoints");

  const auto first = nn::LoadCheckpoint(checkpoints.front());
  const nn::BackboneSpec spec = first->spec();
  const Variant variant = first->variant();
  const RawInputs raw = ComputeRawInputs(spec, variant, exp.features, manifest, ctx);
  std::unique_ptr<text::FeaturePipeline> pipeline;
  if (variant != Variant::kBaseline) {
    pipeline = std::make_unique<text::FeaturePipeline>(text::FeaturePipeline::Load(run_dir / "pipeline.json"));
  }
  const ExampleSet set = BuildExamples(spec, variant, manifest, manifest.Ids(), raw, pipeline.get());
  std::vector<eval::EvalReport> reports;
  for (const auto& path : checkpoints) {
    auto model = nn::LoadCheckpoint(path);
    reports.push_back(Evaluate(*model, set));
  }
  return eval::MeanReport(reports);
}

}  // namespace cadd::train
