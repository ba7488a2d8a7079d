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

#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "cadd/common/error.h"
#include "cadd/common/random.h"
#include "cadd/train/experiment.h"
#include "cadd/train/toy.h"
#include "cadd/train/trainer.h"
#include "test_util.h"

namespace cadd::train {
namespace {

nn::BackboneSpec SmallLcnn() {
  nn::BackboneSpec spec = nn::BackboneSpec::For(nn::BackboneKind::kLcnn);
  spec.channels = 2;
  spec.input_frames = 16;
  spec.feature_width = 8;
  return spec;
}

// Noise audio; side vectors shifted by +-1 along a fixed direction.
ExampleSet SeparableSet(const nn::BackboneSpec& spec, std::size_t n, std::uint64_t seed, bool with_side = true) {
  Rng rng(seed);
  ExampleSet set;
  set.sample_shape = spec.SampleShape();
  set.side_width = with_side ? nn::kContextInputWidth : 0;
  Eigen::VectorXd direction(nn::kContextInputWidth);
  Rng dir_rng(99);
  for (auto& d : direction) d = dir_rng.Normal();
  direction.normalize();
  for (std::size_t i = 0; i < n; ++i) {
    const double y = i % 2 == 0 ? 0.0 : 1.0;
    std::vector<double> audio(set.sample_size());
    for (auto& a : audio) a = rng.Normal();
    Eigen::VectorXd side(nn::kContextInputWidth);
    for (auto& s : side) s = 0.3 * rng.Normal();
    side += (y > 0.5 ? 3.0 : -3.0) * direction;
    set.Add("x" + std::to_string(i), audio,
            with_side ? std::span<const double>(side.data(), static_cast<std::size_t>(side.size()))
                      : std::span<const double>(),
            y);
  }
  return set;
}

TrainConfig QuickConfig(int epochs) {
  TrainConfig c = TrainConfig::Defaults(nn::BackboneKind::kLcnn, Variant::kTPlusC);
  c.backbone = SmallLcnn();
  c.epochs = epochs;
  c.seeds = {0};
  return c;
}

TEST(TrainConfigTest, PaperDefaults) {
  const auto raw = TrainConfig::Defaults(nn::BackboneKind::kRawNet3, Variant::kBaseline);
  EXPECT_DOUBLE_EQ(raw.lr, 1e-3);
  EXPECT_DOUBLE_EQ(raw.weight_decay, 5e-5);
  const auto lcnn = TrainConfig::Defaults(nn::BackboneKind::kLcnn, Variant::kTPlusC);
  EXPECT_DOUBLE_EQ(lcnn.lr, 1e-4);
  EXPECT_DOUBLE_EQ(lcnn.weight_decay, 1e-4);
  EXPECT_EQ(lcnn.batch_size, 16);
  EXPECT_EQ(lcnn.epochs, 30);
  EXPECT_EQ(lcnn.seeds, (std::vector<std::uint64_t>{0, 1, 2}));
  EXPECT_TRUE(lcnn.Overrides().empty());
}

TEST(TrainConfigTest, UnsetSeedsDefaultToZeroOneTwo) {
  const auto c = TrainConfig::FromJson({{"backbone", "mesonet"}, {"variant", "BASELINE"}});
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{0, 1, 2}));
}

TEST(TrainConfigTest, OverridesAreListedAndRoundTrip) {
  auto c = QuickConfig(10);
  c.lr = 5e-4;
  const auto overrides = c.Overrides();
  EXPECT_FALSE(overrides.empty());
  const auto back = TrainConfig::FromJson(c.ToJson());
  EXPECT_EQ(back.Hash(), c.Hash());
  EXPECT_EQ(back.epochs, 10);
}

TEST(TrainConfigTest, RejectsInvalidValues) {
  auto c = QuickConfig(30);
  c.batch_size = 0;
  EXPECT_THROW(c.Validate(), ValidationError);
  c = QuickConfig(30);
  c.seeds.clear();
  EXPECT_THROW(c.Validate(), ValidationError);
}

TEST(AdamTest, MatchesHandComputedSteps) {
  auto p = nn::MakeTensor({2}, {1.0, -2.0}, true);
  Adam opt({{"p", p}}, 0.1, 0.5);
  p->mutable_grad()[0] = 0.2;
  opt.Step();
  // g = grad + wd * p; the first bias-corrected step is lr * g / (|g| + eps).
  const double g0 = 0.2 + 0.5 * 1.0, g1 = 0.0 + 0.5 * -2.0;
  EXPECT_NEAR(p->value[0], 1.0 - 0.1 * g0 / (std::abs(g0) + 1e-8), 1e-12);
  EXPECT_NEAR(p->value[1], -2.0 - 0.1 * g1 / (std::abs(g1) + 1e-8), 1e-12);

  const double p0 = p->value[0];
  opt.ZeroGrad();
  p->mutable_grad()[0] = 0.2;
  opt.Step();
  const double g = 0.2 + 0.5 * p0;
  const double m = (0.1 * g0 * 0.9 + 0.1 * g);  // m2 = 0.9*m1 + 0.1*g, m1 = 0.1*g0
  const double v = (0.001 * g0 * g0 * 0.999 + 0.001 * g * g);
  const double mhat = m / (1 - 0.81), vhat = v / (1 - 0.999 * 0.999);
  EXPECT_NEAR(p->value[0], p0 - 0.1 * mhat / (std::sqrt(vhat) + 1e-8), 1e-12);
  EXPECT_EQ(opt.steps(), 2);
}

TEST(TrainOneTest, ZeroLearningRateLeavesParametersUnchanged) {
  auto config = QuickConfig(1);
  config.lr = 0.0;
  config.weight_decay = 0.0;
  const auto train = SeparableSet(config.backbone, 20, 1);
  const auto run = TrainOne(config, 0, train, {});
  const nn::CaddModel fresh(config.backbone, config.variant, 0);
  const auto a = fresh.NamedParameters();
  const auto b = run.model->NamedParameters();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].second->value, b[i].second->value) << a[i].first;
}

TEST(TrainOneTest, SameSeedIsBitwiseDeterministic) {
  const auto config = QuickConfig(3);
  const auto train = SeparableSet(config.backbone, 24, 2);
  const auto val = SeparableSet(config.backbone, 8, 3);
  const auto a = TrainOne(config, 1, train, val);
  const auto b = TrainOne(config, 1, train, val);
  EXPECT_NEAR(a.final_train_loss, b.final_train_loss, 1e-10);
  EXPECT_EQ(nn::StateHash(*a.model), nn::StateHash(*b.model));
  EXPECT_EQ(a.selected_epoch, b.selected_epoch);
  const auto c = TrainOne(config, 2, train, val);
  EXPECT_NE(nn::StateHash(*a.model), nn::StateHash(*c.model));
}

TEST(TrainOneTest, ToySeparableSetReachesHighTrainAccuracy) {
  const auto config = QuickConfig(30);
  const auto train = SeparableSet(config.backbone, 40, 4);

  // A least-squares linear probe on the side vectors must already separate.
  Eigen::MatrixXd x(40, nn::kContextInputWidth + 1);
  Eigen::VectorXd y(40);
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < nn::kContextInputWidth; ++j) x(i, j) = train.side[i * nn::kContextInputWidth + j];
    x(i, nn::kContextInputWidth) = 1.0;
    y[i] = train.labels[i] * 2.0 - 1.0;
  }
  const Eigen::VectorXd w = x.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd fit = x * w;
  for (int i = 0; i < 40; ++i) ASSERT_GT(fit[i] * y[i], 0.0) << i;

  const auto run = TrainOne(config, 0, train, {});
  EXPECT_EQ(run.selection, "final_epoch");
  EXPECT_EQ(static_cast<int>(run.curve.size()), 30);
  EXPECT_LT(run.final_train_loss, run.initial_train_loss);
  EXPECT_GE(Accuracy(*run.model, train), 0.95);
}

TEST(TrainOneTest, SelectsBestValidationLoss) {
  const auto config = QuickConfig(4);
  const auto run = TrainOne(config, 0, SeparableSet(config.backbone, 24, 5), SeparableSet(config.backbone, 8, 6));
  EXPECT_EQ(run.selection, "best_val_loss");
  double best = std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  for (const auto& e : run.curve) {
    if (e.val_loss < best) {
      best = e.val_loss;
      best_epoch = e.epoch;
    }
  }
  EXPECT_EQ(run.selected_epoch, best_epoch);
}

TEST(TrainOneTest, NonFiniteLossAborts) {
  const auto config = QuickConfig(1);
  auto train = SeparableSet(config.backbone, 8, 7);
  train.side[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(TrainOne(config, 0, train, {}), TrainingError);
}

TEST(TrainOneTest, GuardRejectsIdsOutsideTheFitSet) {
  const auto config = QuickConfig(1);
  const auto train = SeparableSet(config.backbone, 8, 8);
  const data::LeakageGuard guard({"x0", "x1"});
  EXPECT_THROW(TrainOne(config, 0, train, {}, &guard), ValidationError);
}

TEST(TrainOneTest, ContextVariantNeedsSideInputs) {
  const auto config = QuickConfig(1);
  EXPECT_THROW(TrainOne(config, 0, SeparableSet(config.backbone, 8, 9, false), {}), ValidationError);
}

TEST(TrainAveragedTest, SingleSeedMeanEqualsThatSeed) {
  const auto config = QuickConfig(2);
  const auto train = SeparableSet(config.backbone, 16, 10);
  const auto test = SeparableSet(config.backbone, 10, 11);
  const auto result = TrainAveraged(config, train, {}, test);
  ASSERT_EQ(result.per_seed.size(), 1u);
  const auto& only = result.per_seed[0].report;
  EXPECT_EQ(result.mean.auc, only.auc);
  EXPECT_EQ(result.mean.eer, only.eer);
  EXPECT_EQ(result.mean.avg, only.avg);
  EXPECT_EQ(result.mean.fake.f1, only.fake.f1);
  EXPECT_EQ(result.mean.weighted.precision, only.weighted.precision);
}

TEST(TrainAveragedTest, MeanOfOneTwoThreeIsTwo) {
  std::vector<eval::EvalReport> reports(3);
  for (int i = 0; i < 3; ++i) {
    reports[i].auc = reports[i].eer = reports[i].avg = i + 1.0;
    reports[i].fake.f1 = i + 1.0;
  }
  const auto m = eval::MeanReport(reports);
  EXPECT_DOUBLE_EQ(*m.auc, 2.0);
  EXPECT_DOUBLE_EQ(*m.eer, 2.0);
  EXPECT_DOUBLE_EQ(*m.avg, 2.0);
  EXPECT_DOUBLE_EQ(m.fake.f1, 2.0);
}

TEST(TrainAveragedTest, WritesRunDirectoryLayout) {
  testing::TempDir tmp;
  auto config = QuickConfig(2);
  config.seeds = {0, 1};
  const auto train = SeparableSet(config.backbone, 16, 12);
  const auto test = SeparableSet(config.backbone, 8, 13);
  TrainAveraged(config, train, {}, test, tmp.path());
  EXPECT_TRUE(std::filesystem::exists(tmp / "config.json"));
  EXPECT_TRUE(std::filesystem::exists(tmp / "report.json"));
  for (const char* seed : {"seed_0", "seed_1"}) {
    EXPECT_TRUE(std::filesystem::exists(tmp / seed / "model.ckpt"));
    EXPECT_TRUE(std::filesystem::exists(tmp / seed / "loss_curve.csv"));
    EXPECT_TRUE(std::filesystem::exists(tmp / seed / "report.json"));
  }
}

TEST(ExperimentTest, FitRowsCropsAndTiles) {
  EXPECT_EQ(FitRows({1, 2, 3, 4, 5, 6}, 2, 2), (std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(FitRows({1, 2, 3, 4}, 2, 3), (std::vector<double>{1, 2, 3, 4, 1, 2}));
  EXPECT_THROW(FitRows({1, 2, 3}, 2, 3), ValidationError);
}

class ToyExperimentTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ToyDatasetOptions opts;
    opts.n = 24;
    opts.duration_s = 0.25;
    toy_ = WriteToyDataset(tmp_.path() / "toy", opts);
  }

  ExperimentConfig Config(Variant variant, const std::string& features) {
    ExperimentConfig c;
    c.manifest = toy_.manifest;
    c.features = audio::FeatureSetSpec::Parse(features);
    c.train = TrainConfig::Defaults(nn::BackboneKind::kLcnn, variant);
    c.train.backbone.channels = 2;
    c.train.backbone.input_frames = 16;
    c.train.epochs = 2;
    c.train.seeds = {0};
    c.providers.context_fixtures = toy_.context_fixtures;
    return c;
  }

  testing::TempDir tmp_;
  ToyDataset toy_;
};

TEST_F(ToyExperimentTest, SideNormalizationIsFitOnTrainIdsOnly) {
  auto config = Config(Variant::kTPlusC, "lfcc");
  ExperimentContext ctx(config.providers);
  const auto manifest = data::LoadManifest(config.manifest);
  const auto spec = ResolveSpec(config.train.backbone, config.features, ctx);
  const auto raw = ComputeRawInputs(spec, config.train.variant, config.features, manifest, ctx);
  const auto split = data::StratifiedSplit(manifest, {0.7, 0.1, 0.2}, 0);
  const data::LeakageGuard guard(split.train_ids);
  auto leaky = split.train_ids;
  leaky.push_back(split.test_ids.front());
  EXPECT_THROW(FitSidePipeline(config.train.variant, raw, leaky, &guard), ValidationError);
  EXPECT_NO_THROW(FitSidePipeline(config.train.variant, raw, split.train_ids, &guard));
}

TEST_F(ToyExperimentTest, SpeechEncoderStaysFrozen) {
  auto config = Config(Variant::kTPlusC, "enc");
  ExperimentContext ctx(config.providers);
  ASSERT_NE(ctx.encoder(), nullptr);
  const auto before = ctx.encoder()->ParameterHash();
  const auto manifest = data::LoadManifest(config.manifest);
  const auto spec = ResolveSpec(config.train.backbone, config.features, ctx);
  EXPECT_EQ(spec.feature_width, ctx.encoder()->width());
  const auto raw = ComputeRawInputs(spec, config.train.variant, config.features, manifest, ctx);
  const auto ids = manifest.Ids();
  const auto pipeline = FitSidePipeline(config.train.variant, raw, ids, nullptr);
  const auto set = BuildExamples(spec, config.train.variant, manifest, ids, raw, &pipeline);
  config.train.backbone = spec;
  TrainOne(config.train, 0, set, {});
  EXPECT_EQ(ctx.encoder()->ParameterHash(), before);
}

TEST_F(ToyExperimentTest, RunAndReevaluate) {
  auto config = Config(Variant::kTPlusC, "lfcc");
  config.out_dir = tmp_.path() / "run";
  const auto result = RunExperiment(config);
  EXPECT_TRUE(std::filesystem::exists(config.out_dir / "split.json"));
  EXPECT_TRUE(std::filesystem::exists(config.out_dir / "pipeline.json"));
  EXPECT_TRUE(std::filesystem::exists(config.out_dir / "seed_0" / "model.ckpt"));
  ASSERT_TRUE(result.mean.avg.has_value());
  const auto again = EvaluateRun(config.out_dir, config.manifest);
  EXPECT_EQ(again.scored.size(), 24u);
}

TEST_F(ToyExperimentTest, TwoFoldCrossValidation) {
  auto config = Config(Variant::kBaseline, "lfcc");
  config.train.epochs = 1;
  const auto cv = RunCrossValidation(config, 2);
  ASSERT_EQ(cv.folds.size(), 2u);
  EXPECT_NEAR(cv.mean.fake.f1, (cv.folds[0].fake.f1 + cv.folds[1].fake.f1) / 2.0, 1e-12);
}

}  // namespace
}  // namespace cadd::train
