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

// cadd: batch operator surface over the library. Exit codes: 0 ok,
// 1 a check did not pass, 2 invalid input, 3 environment or provider failure.
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "cadd/common/error.h"
#include "cadd/common/io.h"
#include "cadd/context/providers.h"
#include "cadd/data/dataset.h"
#include "cadd/eval/metrics.h"
#include "cadd/eval/reconcile.h"
#include "cadd/perturb/perturb.h"
#include "cadd/perturb/sweep.h"
#include "cadd/stats/linguistics.h"
#include "cadd/stats/tests.h"
#include "cadd/syn/syngen.h"
#include "cadd/train/experiment.h"

namespace cadd::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::string> SplitWords(const std::string& command) {
  std::istringstream in(command);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  if (out.empty()) throw ValidationError("empty command");
  return out;
}

std::pair<std::string, std::string> SplitOnce(const std::string& text, char sep, const std::string& what) {
  const auto pos = text.find(sep);
  if (pos == std::string::npos || pos == 0) throw ValidationError(what + " must look like NAME" + sep + "VALUE");
  return {text.substr(0, pos), text.substr(pos + 1)};
}

json LoadConfig(const fs::path& path) {
  try {
    return ReadJsonFile(path);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// --- ingest-context ---------------------------------------------------------

struct IngestArgs {
  std::string manifest, fixtures, cache, out;
  bool live = false;
};

int Ingest(const IngestArgs& a) {
  const auto manifest = data::LoadManifest(a.manifest, {.check_audio_exists = false});
  if (a.live == !a.fixtures.empty()) throw ValidationError("give exactly one of --fixtures or --live");
  auto providers = a.live ? context::MakeLiveProviders({}) : context::MakeStubProviders(a.fixtures);
  std::unique_ptr<context::ContextCache> cache;
  if (!a.cache.empty()) cache = std::make_unique<context::ContextCache>(a.cache);
  fs::create_directories(a.out);
  json index = json::array();
  for (const auto& s : manifest.samples()) {
    const auto bundle = context::FetchContext(s.subject, s.publish_date, providers, cache.get());
    WriteJsonFile(fs::path(a.out) / (s.id + ".json"), context::ToJson(bundle));
    index.push_back({{"id", s.id},
                     {"subject", s.subject},
                     {"news", bundle.news.size()},
                     {"posts", bundle.posts.size()},
                     {"profile", bundle.profile.has_value()}});
  }
  WriteJsonFile(fs::path(a.out) / "index.json", index);
  std::cout << "context bundles: " << manifest.size() << " -> " << a.out << "\n";
  return 0;
}

// --- features ---------------------------------------------------------------

struct FeaturesArgs {
  std::string manifest, feature_set = "lfcc", cache, backbone = "lcnn", encoder = "random_projection";
  std::uint64_t encoder_seed = 0;
  int encoder_width = 32;
};

int Features(const FeaturesArgs& a) {
  train::ProviderConfig pc;
  pc.context_mode = "none";
  pc.encoder = a.encoder;
  pc.encoder_seed = a.encoder_seed;
  pc.encoder_width = a.encoder_width;
  pc.feature_cache = a.cache;
  train::ExperimentContext ctx(pc);
  const auto features = audio::FeatureSetSpec::Parse(a.feature_set);
  const auto manifest = data::LoadManifest(a.manifest);
  const auto spec = train::ResolveSpec(nn::BackboneSpec::For(nn::ParseBackboneKind(a.backbone)), features, ctx);
  const auto raw = train::ComputeRawInputs(spec, Variant::kBaseline, features, manifest, ctx);
  std::cout << "features " << features.ToString() << ": " << raw.audio.size() << " samples, width "
            << ctx.extractor().Width(features) << ", cache " << a.cache << "\n";
  return 0;
}

// --- split ------------------------------------------------------------------

struct SplitArgs {
  std::string manifest, out = "split.json", manifests_dir;
  std::uint64_t seed = 0;
  std::vector<double> fractions{0.7, 0.1, 0.2};
};

int Split(const SplitArgs& a) {
  if (a.fractions.size() != 3) throw ValidationError("--fractions needs train,val,test");
  const auto manifest = data::LoadManifest(a.manifest);
  const auto split = data::StratifiedSplit(manifest, {a.fractions[0], a.fractions[1], a.fractions[2]}, a.seed);
  WriteJsonFile(a.out, data::SplitToJson(split));
  if (!a.manifests_dir.empty()) {
    const fs::path dir = a.manifests_dir;
    data::SaveManifest(manifest.Subset(split.train_ids, "train"), dir / "train.jsonl");
    data::SaveManifest(manifest.Subset(split.val_ids, "val"), dir / "val.jsonl");
    data::SaveManifest(manifest.Subset(split.test_ids, "test"), dir / "test.jsonl");
  }
  std::cout << "train " << split.train_ids.size() << ", val " << split.val_ids.size() << ", test "
            << split.test_ids.size() << " -> " << a.out << "\n";
  return 0;
}

// --- train / cross-validate -------------------------------------------------

struct TrainArgs {
  std::string config, out, variant, feature_set;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<double> lr;
  int k = 10;
};

// Flags override the file. --seed sets the split seed and renumbers the
// training seeds from it, keeping their count.
train::ExperimentConfig ResolveExperiment(const TrainArgs& a) {
  json j = LoadConfig(a.config);
  if (!a.out.empty()) j["out_dir"] = fs::absolute(a.out).string();
  if (!a.variant.empty()) j["variant"] = a.variant;
  if (!a.feature_set.empty()) j["feature_set"] = a.feature_set;
  if (a.epochs) j["epochs"] = *a.epochs;
  if (a.lr) j["lr"] = *a.lr;
  if (a.seed) {
    j["split_seed"] = *a.seed;
    const std::size_t n = j.contains("seeds") ? j["seeds"].size() : 3;
    json seeds = json::array();
    for (std::size_t i = 0; i < n; ++i) seeds.push_back(*a.seed + i);
    j["seeds"] = seeds;
  }
  auto cfg = train::ExperimentConfig::FromJson(j, fs::absolute(a.config).parent_path());
  if (cfg.out_dir.empty()) throw ValidationError("no output directory: set out_dir or pass --out");
  return cfg;
}

int Train(const TrainArgs& a) {
  const auto cfg = ResolveExperiment(a);
  const auto result = train::RunExperiment(cfg);
  std::cout << eval::ReportCsvHeader() << eval::ReportCsvRow(cfg.name, result.mean);
  std::cout << "run directory: " << cfg.out_dir.string() << "\n";
  return 0;
}

int CrossValidate(const TrainArgs& a) {
  const auto cfg = ResolveExperiment(a);
  const auto result = train::RunCrossValidation(cfg, a.k);
  std::cout << eval::ReportCsvHeader();
  for (std::size_t i = 0; i < result.folds.size(); ++i) {
    std::cout << eval::ReportCsvRow("fold_" + std::to_string(i), result.folds[i]);
  }
  std::cout << eval::ReportCsvRow("mean", result.mean);
  return 0;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string run, manifest, out, label;
};

int Eval(const EvalArgs& a) {
  const auto report = train::EvaluateRun(a.run, a.manifest);
  const fs::path out = a.out.empty() ? fs::path(a.run) / ("eval_" + fs::path(a.manifest).stem().string()) : fs::path(a.out);
  const std::string label = a.label.empty() ? fs::path(a.run).filename().string() : a.label;
  eval::WriteReport(out, label, report);
  std::cout << eval::ReportCsvHeader() << eval::ReportCsvRow(label, report);
  return 0;
}

// --- perturb-sweep / degradation-report -------------------------------------

struct SweepArgs {
  std::string manifest, out, noise_dir = CADD_DEFAULT_NOISE_DIR, mp3_codec = "ffmpeg";
  std::vector<std::string> only;
  std::uint64_t seed = 0;
  bool serial = false;
};

int Sweep(const SweepArgs& a) {
  const auto manifest = data::LoadManifest(a.manifest);
  std::vector<perturb::Perturbation> grid;
  if (a.only.empty()) {
    grid = perturb::Grid(a.seed);
  } else {
    for (const auto& name : a.only) grid.push_back(perturb::Perturbation::Parse(name, a.seed));
  }
  const perturb::NoiseBank noise(a.noise_dir);
  std::unique_ptr<perturb::Mp3Codec> mp3;
  if (a.mp3_codec == "null") {
    mp3 = std::make_unique<perturb::NullMp3Codec>();
  } else if (a.mp3_codec == "ffmpeg") {
    mp3 = std::make_unique<perturb::FfmpegMp3Codec>();
  } else {
    throw ValidationError("--mp3-codec must be ffmpeg or null");
  }
  const auto entries = perturb::RunSweep(manifest, grid, {&noise, mp3.get()}, a.out, !a.serial);
  std::cout << entries.size() << " perturbations x " << manifest.size() << " samples -> " << a.out << "\n";
  return 0;
}

struct DegradationArgs {
  std::string sweep, clean, out;
  std::vector<std::string> runs;
};

int Degradation(const DegradationArgs& a) {
  const auto entries = perturb::LoadSweep(a.sweep);
  eval::DegradationTable table;
  for (const auto& spec : a.runs) {
    const auto [label, dir] = SplitOnce(spec, '=', "--run");
    const fs::path report_dir = fs::path(a.out) / label;
    const auto clean = train::EvaluateRun(dir, a.clean);
    eval::WriteReport(report_dir / "clean", label, clean);
    std::vector<std::pair<std::string, eval::EvalReport>> perturbed;
    for (const auto& e : entries) {
      const auto name = e.perturbation.Name();
      auto report = train::EvaluateRun(dir, e.manifest);
      eval::WriteReport(report_dir / name, label, report);
      perturbed.emplace_back(name, std::move(report));
    }
    table.AddColumn(label, clean, perturbed);
  }
  WriteFileAtomic(fs::path(a.out) / "degradation.csv", table.ToCsv());
  std::cout << table.ToCsv();
  return 0;
}

// --- stats-compare ----------------------------------------------------------

struct StatsArgs {
  std::vector<std::string> pairs;
  std::string categories, group_a, group_b = "*", out;
};

std::vector<eval::ScoredSample> Scores(const fs::path& path) {
  const fs::path file = fs::is_directory(path) ? path / "report.json" : path;
  auto report = eval::EvalReport::FromJson(LoadConfig(file));
  if (report.scored.empty()) throw ValidationError(file.string() + ": report has no per-sample scores");
  return report.scored;
}

int StatsCompare(const StatsArgs& a) {
  std::vector<stats::ErrorComparison> family;
  std::vector<stats::GroupComparison> groups;
  std::map<std::string, std::string> category_of;
  if (!a.categories.empty()) {
    for (const auto& [id, cat] : LoadConfig(a.categories).items()) category_of[id] = cat.get<std::string>();
    if (a.group_a.empty()) throw ValidationError("--categories needs --group-a");
  }
  for (const auto& spec : a.pairs) {
    const auto [name, files] = SplitOnce(spec, '=', "--pair");
    const auto [base, cadd] = SplitOnce(files, ',', "--pair value");
    const auto cadd_scores = Scores(cadd);
    family.push_back(stats::CompareErrors(Scores(base), cadd_scores, name));
    if (!category_of.empty()) {
      groups.push_back(stats::CompareCategories(cadd_scores, category_of, a.group_a, a.group_b, name));
    }
  }
  stats::AdjustFamily(family);
  if (!groups.empty()) stats::AdjustFamily(groups);

  std::ostringstream csv;
  csv << "comparison,n,baseline_median,cadd_median,u,p_one_sided,p_two_sided,p_adjusted,stars,exact,direction\n";
  for (const auto& c : family) {
    csv << c.name << "," << c.n << "," << c.baseline_median << "," << c.cadd_median << "," << c.u << "," << c.p
        << "," << c.p_two_sided << "," << c.p_adjusted << "," << c.stars() << "," << (c.exact ? "exact" : "normal")
        << "," << c.direction << "\n";
  }
  json out{{"comparisons", json::array()}, {"categories", json::array()}};
  for (const auto& c : family) out["comparisons"].push_back(c.ToJson());
  for (const auto& g : groups) out["categories"].push_back(g.ToJson());
  if (!a.out.empty()) {
    WriteFileAtomic(a.out + ".csv", csv.str());
    WriteJsonFile(a.out + ".json", out);
  }
  std::cout << csv.str();
  for (const auto& g : groups) {
    std::cout << g.name << ": " << g.group_a << " vs " << g.group_b << " p_adj=" << g.p_adjusted << " " << g.stars()
              << "\n";
  }
  return 0;
}

// --- linguistics ------------------------------------------------------------

struct LinguisticsArgs {
  std::string manifest, a, b, out;
  int runs = stats::kLdaRuns;
  std::uint64_t seed = 0;
};

// JSONL with a "text" or "transcript" field per line, or plain text lines.
std::vector<std::string> ReadTexts(const fs::path& path) {
  std::vector<std::string> out;
  std::istringstream in(ReadTextFile(path));
  for (std::string line; std::getline(in, line);) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = json::parse(line, nullptr, false);
    if (!j.is_discarded() && j.is_object()) {
      const char* key = j.contains("text") ? "text" : "transcript";
      if (!j.contains(key) || !j[key].is_string()) continue;
      out.push_back(j[key].get<std::string>());
    } else {
      out.push_back(line);
    }
  }
  return out;
}

int Linguistics(const LinguisticsArgs& a) {
  std::vector<std::string> texts_a, texts_b;
  std::string name_a = "a", name_b = "b";
  if (!a.manifest.empty()) {
    const auto manifest = data::LoadManifest(a.manifest, {.check_audio_exists = false});
    for (const auto& s : manifest.samples()) {
      if (!s.transcript) continue;
      (s.label == data::Label::kReal ? texts_a : texts_b).push_back(*s.transcript);
    }
    name_a = "real";
    name_b = "fake";
  } else {
    if (a.a.empty() || a.b.empty()) throw ValidationError("give --manifest or both --a and --b");
    texts_a = ReadTexts(a.a);
    texts_b = ReadTexts(a.b);
  }
  stats::LdaOptions lda;
  lda.first_seed = a.seed;
  const auto pa = stats::ProfileTexts(texts_a, a.runs, lda);
  const auto pb = stats::ProfileTexts(texts_b, a.runs, lda);
  const auto cmp = stats::CompareProfiles(pa, pb);
  std::ostringstream csv;
  csv << "metric,mean_" << name_a << ",mean_" << name_b << ",p,p_adjusted,stars\n";
  json out{{name_a, pa.ToJson()}, {name_b, pb.ToJson()}, {"comparisons", json::array()}};
  for (const auto& c : cmp) {
    csv << c.metric << "," << c.mean_a << "," << c.mean_b << "," << c.p << "," << c.p_adjusted << ","
        << stats::Stars(c.p_adjusted) << "\n";
    out["comparisons"].push_back(
        {{"metric", c.metric}, {"mean_a", c.mean_a}, {"mean_b", c.mean_b}, {"p", c.p}, {"p_adjusted", c.p_adjusted}});
  }
  if (!a.out.empty()) {
    WriteFileAtomic(a.out + ".csv", csv.str());
    WriteJsonFile(a.out + ".json", out);
  }
  std::cout << csv.str();
  return 0;
}

// --- syn-generate -----------------------------------------------------------

struct SynArgs {
  std::string manifest, out, fixtures, transcripts;
  bool live_news = false;
  std::string llm = "stub", llm_command, model = "gpt-4o";
  double temperature = 1.0;
  std::vector<std::string> cloners;
  std::string start_date = "2023-01-01", end_date;
  std::uint64_t seed = 0;
  int max_attempts = 3;
};

int SynGenerate(const SynArgs& a) {
  const auto authentic = data::LoadManifest(a.manifest);
  syn::TranscriptSet transcripts;
  if (!a.transcripts.empty()) {
    transcripts = syn::LoadTranscripts(a.transcripts);
  } else {
    std::unique_ptr<syn::LlmProvider> llm;
    if (a.llm == "stub") {
      llm = std::make_unique<syn::StubLlm>(a.seed);
    } else if (a.llm == "command") {
      llm = std::make_unique<syn::CommandLlm>(SplitWords(a.llm_command));
    } else if (a.llm == "chat") {
      syn::ChatLlmOptions o;
      o.model = a.model;
      o.temperature = a.temperature;
      llm = std::make_unique<syn::ChatLlm>(o);
    } else {
      throw ValidationError("--llm must be stub, command or chat");
    }
    if (a.live_news == !a.fixtures.empty()) throw ValidationError("give exactly one of --fixtures or --live-news");
    auto providers = a.live_news ? context::MakeLiveProviders({}) : context::MakeStubProviders(a.fixtures);
    syn::SynOptions opts;
    opts.seed = a.seed;
    opts.max_attempts = a.max_attempts;
    opts.start_date = Date::Parse(a.start_date);
    if (!a.end_date.empty()) opts.end_date = Date::Parse(a.end_date);
    transcripts = syn::GenerateFakeTranscripts(authentic, providers.news.get(), *llm, opts);
  }

  std::vector<std::unique_ptr<syn::VoiceCloner>> owned;
  const auto specs = a.cloners.empty() ? syn::DefaultClonerNames() : a.cloners;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      owned.push_back(std::make_unique<syn::StubCloner>(spec));
    } else {
      owned.push_back(std::make_unique<syn::CommandCloner>(spec.substr(0, eq), SplitWords(spec.substr(eq + 1))));
    }
  }
  std::vector<syn::VoiceCloner*> cloners;
  for (auto& c : owned) cloners.push_back(c.get());
  const auto fakes = syn::GenerateFakeAudio(transcripts, cloners, a.out, a.seed);
  const auto paths = syn::WriteSynDataset(authentic, transcripts, fakes, a.out);
  const std::size_t failures = transcripts.failures.size() + fakes.failures.size();
  std::cout << "transcripts " << transcripts.records.size() << ", fake audio " << fakes.manifest.size()
            << ", failures " << failures << " -> " << paths.dataset_manifest.string() << "\n";
  if (fakes.manifest.empty() && failures > 0) throw EnvironmentError("no synthetic sample could be generated");
  return 0;
}

// --- reconcile-tables -------------------------------------------------------

struct ReconcileArgs {
  std::string tables = CADD_DEFAULT_DATA_DIR "/published_tables.csv";
  std::string claims = CADD_DEFAULT_DATA_DIR "/published_claims.csv";
  std::string out;
};

int ReconcileTables(const ReconcileArgs& a) {
  const auto rec = eval::Reconcile(eval::LoadPublishedTables(a.tables), eval::LoadClaims(a.claims));
  if (!a.out.empty()) {
    WriteFileAtomic(a.out + ".csv", rec.ToCsv());
    WriteJsonFile(a.out + ".json", rec.ToJson());
  }
  std::size_t complete = 0;
  for (const auto& r : rec.rows) complete += r.complete();
  std::cout << "rows " << rec.rows.size() << ", complete " << complete << "\n";
  for (const auto& c : rec.claims) {
    std::printf("%s %s: claimed %.2f recomputed %.2f (%s/%s/%s); group max %.2f at %s%s\n",
                c.matches ? "MATCH" : "MISMATCH", c.claim.name.c_str(), c.claim.value, eval::Round2(c.recomputed),
                c.claim.dataset.c_str(), c.claim.model.c_str(), c.claim.variant.c_str(), c.group_max,
                c.group_max_row.c_str(), c.is_group_max ? "" : " (claimed row is not the maximum)");
  }
  return rec.ok() ? 0 : 1;
}

int Run(int argc, char** argv) {
  CLI::App app{"Context-aware audio deepfake detection pipeline"};
  app.require_subcommand(1);
  std::function<int()> action;

  IngestArgs ingest;
  auto* c = app.add_subcommand("ingest-context", "Fetch and cache context bundles for a manifest");
  c->add_option("--manifest", ingest.manifest)->required();
  c->add_option("--fixtures", ingest.fixtures, "Fixture directory for the offline providers");
  c->add_flag("--live", ingest.live, "Query Wikidata, WorldNewsAPI and Reddit");
  c->add_option("--cache", ingest.cache, "Context cache directory");
  c->add_option("--out", ingest.out)->required();
  c->callback([&] { action = [&] { return Ingest(ingest); }; });

  FeaturesArgs feats;
  c = app.add_subcommand("features", "Extract and cache acoustic features");
  c->add_option("--manifest", feats.manifest)->required();
  c->add_option("--feature-set", feats.feature_set, "e.g. lfcc, mfcc+enc")->capture_default_str();
  c->add_option("--cache", feats.cache)->required();
  c->add_option("--backbone", feats.backbone)->capture_default_str();
  c->add_option("--encoder", feats.encoder, "random_projection or none")->capture_default_str();
  c->add_option("--encoder-seed,--seed", feats.encoder_seed);
  c->add_option("--encoder-width", feats.encoder_width)->capture_default_str();
  c->callback([&] { action = [&] { return Features(feats); }; });

  SplitArgs split;
  c = app.add_subcommand("split", "Stratified train/val/test split");
  c->add_option("--manifest", split.manifest)->required();
  c->add_option("--seed", split.seed);
  c->add_option("--fractions", split.fractions)->delimiter(',')->expected(3);
  c->add_option("--out", split.out)->capture_default_str();
  c->add_option("--manifests-dir", split.manifests_dir, "Also write train/val/test.jsonl here");
  c->callback([&] { action = [&] { return Split(split); }; });

  TrainArgs tr;
  auto add_train_flags = [&](CLI::App* sub) {
    sub->add_option("--config", tr.config)->required()->check(CLI::ExistingFile);
    sub->add_option("--out", tr.out);
    sub->add_option("--seed", tr.seed);
    sub->add_option("--epochs", tr.epochs);
    sub->add_option("--lr", tr.lr);
    sub->add_option("--variant", tr.variant, "BASELINE, T, C or T+C");
    sub->add_option("--feature-set", tr.feature_set);
  };
  c = app.add_subcommand("train", "Train one configuration (seed-averaged)");
  add_train_flags(c);
  c->callback([&] { action = [&] { return Train(tr); }; });
  c = app.add_subcommand("cross-validate", "Stratified k-fold cross-validation");
  add_train_flags(c);
  c->add_option("--k", tr.k)->capture_default_str();
  c->callback([&] { action = [&] { return CrossValidate(tr); }; });

  EvalArgs ev;
  c = app.add_subcommand("eval", "Evaluate a run directory on a manifest");
  c->add_option("--run", ev.run)->required()->check(CLI::ExistingDirectory);
  c->add_option("--manifest", ev.manifest)->required();
  c->add_option("--out", ev.out);
  c->add_option("--label", ev.label);
  c->callback([&] { action = [&] { return Eval(ev); }; });

  SweepArgs sw;
  c = app.add_subcommand("perturb-sweep", "Apply the perturbation grid to a manifest");
  c->add_option("--manifest", sw.manifest)->required();
  c->add_option("--out", sw.out)->required();
  c->add_option("--noise-dir", sw.noise_dir)->capture_default_str();
  c->add_option("--mp3-codec", sw.mp3_codec, "ffmpeg or null")->capture_default_str();
  c->add_option("--only", sw.only, "Perturbation names, e.g. mp3_8kbps");
  c->add_option("--seed", sw.seed);
  c->add_flag("--serial", sw.serial);
  c->callback([&] { action = [&] { return Sweep(sw); }; });

  DegradationArgs deg;
  c = app.add_subcommand("degradation-report", "Avg-score change per perturbation and run");
  c->add_option("--sweep", deg.sweep)->required();
  c->add_option("--clean", deg.clean, "Unperturbed manifest")->required();
  c->add_option("--run", deg.runs, "LABEL=RUN_DIR, repeatable")->required();
  c->add_option("--out", deg.out)->required();
  c->callback([&] { action = [&] { return Degradation(deg); }; });

  StatsArgs st;
  c = app.add_subcommand("stats-compare", "Mann-Whitney U on absolute errors with BH correction");
  c->add_option("--pair", st.pairs, "NAME=BASELINE_REPORT,CADD_REPORT, repeatable")->required();
  c->add_option("--categories", st.categories, "JSON object id -> category");
  c->add_option("--group-a", st.group_a);
  c->add_option("--group-b", st.group_b, "Category or * for all others")->capture_default_str();
  c->add_option("--out", st.out, "Output prefix for .csv and .json");
  c->callback([&] { action = [&] { return StatsCompare(st); }; });

  LinguisticsArgs li;
  c = app.add_subcommand("linguistics", "Readability and topic-diversity comparison of two corpora");
  c->add_option("--manifest", li.manifest, "Compare REAL vs FAKE transcripts");
  c->add_option("--a", li.a);
  c->add_option("--b", li.b);
  c->add_option("--runs", li.runs)->capture_default_str();
  c->add_option("--seed", li.seed);
  c->add_option("--out", li.out, "Output prefix for .csv and .json");
  c->callback([&] { action = [&] { return Linguistics(li); }; });

  SynArgs sy;
  c = app.add_subcommand("syn-generate", "Generate the synthetic persona dataset");
  c->add_option("--manifest", sy.manifest, "Authentic samples")->required();
  c->add_option("--out", sy.out)->required();
  c->add_option("--fixtures", sy.fixtures, "Offline news fixtures");
  c->add_flag("--live-news", sy.live_news);
  c->add_option("--transcripts", sy.transcripts, "Reuse a transcripts.jsonl");
  c->add_option("--llm", sy.llm, "stub, command or chat")->capture_default_str();
  c->add_option("--llm-command", sy.llm_command, "Program invoked as PROGRAM ARGS... PROMPT_FILE");
  c->add_option("--model", sy.model)->capture_default_str();
  c->add_option("--temperature", sy.temperature)->capture_default_str();
  c->add_option("--cloner", sy.cloners, "NAME (stub) or NAME=COMMAND, repeatable");
  c->add_option("--start-date", sy.start_date)->capture_default_str();
  c->add_option("--end-date", sy.end_date, "Defaults to today");
  c->add_option("--seed", sy.seed);
  c->add_option("--max-attempts", sy.max_attempts)->capture_default_str();
  c->callback([&] { action = [&] { return SynGenerate(sy); }; });

  ReconcileArgs rc;
  c = app.add_subcommand("reconcile-tables", "Recompute published Avg scores and check the cited claims");
  c->add_option("--tables", rc.tables)->capture_default_str();
  c->add_option("--claims", rc.claims)->capture_default_str();
  c->add_option("--out", rc.out, "Output prefix for .csv and .json");
  c->callback([&] { action = [&] { return ReconcileTables(rc); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return action();
}

}  // namespace
}  // namespace cadd::cli

int main(int argc, char** argv) {
  try {
    return cadd::cli::Run(argc, argv);
  } catch (const cadd::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const cadd::EnvironmentError& e) {
    std::cerr << "environment error: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
