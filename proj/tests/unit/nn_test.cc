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
#include <cmath>
#include <functional>

#include <gtest/gtest.h>

#include "cadd/common/error.h"
#include "cadd/common/io.h"
#include "cadd/common/random.h"
#include "cadd/nn/cadd_model.h"
#include "cadd/nn/gradcheck.h"
#include "cadd/nn/ops.h"
#include "unit/test_util.h"

namespace cadd::nn {
namespace {

Tensor RandomTensor(Shape shape, Rng& rng, bool requires_grad = false, double scale = 1.0) {
  std::vector<double> v(NumElements(shape));
  for (double& x : v) x = scale * rng.Uniform(-1.0, 1.0);
  return MakeTensor(std::move(shape), std::move(v), requires_grad);
}

// Scalar probe sum_i r_i * y_i, built directly on the tape.
Tensor WeightedSum(const Tensor& y, const std::vector<double>& r) {
  double total = 0.0;
  for (std::size_t i = 0; i < y->numel(); ++i) total += r[i] * y->value[i];
  Tensor out = MakeTensor({1}, {total});
  if (GradEnabled() && y->requires_grad) {
    out->requires_grad = true;
    out->parents = {y};
    Node* o = out.get();
    Node* yp = y.get();
    o->backward = [o, yp, r] {
      double* g = yp->mutable_grad();
      for (std::size_t i = 0; i < yp->numel(); ++i) g[i] += r[i] * o->grad[0];
    };
  }
  return out;
}

// Checks every input coordinate of an op against central differences.
void ExpectOpGradients(const std::vector<Tensor>& inputs, const std::function<Tensor()>& op, double tol = 1e-6) {
  Rng rng(99);
  Tensor y = op();
  std::vector<double> r(y->numel());
  for (double& v : r) v = rng.Uniform(-1.0, 1.0);
  for (const Tensor& t : inputs) t->grad.clear();
  Backward(WeightedSum(op(), r));
  constexpr double h = 1e-6;
  for (std::size_t which = 0; which < inputs.size(); ++which) {
    const Tensor& t = inputs[which];
    for (std::size_t k = 0; k < t->numel(); ++k) {
      const double saved = t->value[k];
      NoGradGuard guard;
      t->value[k] = saved + h;
      const double up = WeightedSum(op(), r)->value[0];
      t->value[k] = saved - h;
      const double down = WeightedSum(op(), r)->value[0];
      t->value[k] = saved;
      const double numeric = (up - down) / (2 * h);
      const double analytic = t->grad.empty() ? 0.0 : t->grad[k];
      EXPECT_NEAR(analytic, numeric, tol * std::max(1.0, std::abs(numeric))) << "input " << which << " coord " << k;
    }
  }
}

TEST(OpsTest, DenseOpGradients) {
  Rng rng(1);
  Tensor x = RandomTensor({3, 5}, rng, true), w = RandomTensor({4, 5}, rng, true), b = RandomTensor({4}, rng, true);
  ExpectOpGradients({x, w, b}, [&] { return Linear(x, w, b); });

  Tensor x1 = RandomTensor({2, 3, 11}, rng, true), w1 = RandomTensor({4, 3, 3}, rng, true),
         b1 = RandomTensor({4}, rng, true);
  ExpectOpGradients({x1, w1, b1}, [&] { return Conv1d(x1, w1, b1, 2, 1); });

  Tensor x2 = RandomTensor({2, 2, 5, 4}, rng, true), w2 = RandomTensor({3, 2, 3, 3}, rng, true),
         b2 = RandomTensor({3}, rng, true);
  ExpectOpGradients({x2, w2, b2}, [&] { return Conv2d(x2, w2, b2, 1, 1); });
}

TEST(OpsTest, ElementwiseAndPoolingGradients) {
  Rng rng(2);
  Tensor x = RandomTensor({2, 4, 6}, rng, true);
  ExpectOpGradients({x}, [&] { return LeakyRelu(x, 0.1); });
  ExpectOpGradients({x}, [&] { return Sigmoid(x); });
  ExpectOpGradients({x}, [&] { return Abs(x); });
  ExpectOpGradients({x}, [&] { return Log(Abs(x), 1e-3); }, 1e-5);
  ExpectOpGradients({x}, [&] { return MaxPool1d(x, 3); });
  ExpectOpGradients({x}, [&] { return Mfm(x); });
  ExpectOpGradients({x}, [&] { return GlobalAvgPool(x); });
  ExpectOpGradients({x}, [&] { return StatsPool(x); });
  ExpectOpGradients({x}, [&] { return MeanNormalize(x); });

  Tensor s = RandomTensor({2, 4}, rng, true);
  ExpectOpGradients({x, s}, [&] { return ChannelScaleAdd(x, s); });
  Tensor a = RandomTensor({2, 3}, rng, true), c = RandomTensor({2, 5}, rng, true);
  ExpectOpGradients({a, c}, [&] { return Concat(a, c); });
  Tensor a2 = RandomTensor({2, 3}, rng, true);
  ExpectOpGradients({a, a2}, [&] { return Add(a, a2); });

  Tensor img = RandomTensor({2, 2, 7, 5}, rng, true);
  ExpectOpGradients({img}, [&] { return MaxPool2d(img, 2, 2); });
  ExpectOpGradients({img}, [&] { return AdaptiveAvgPool2d(img, 3, 2); });
  ExpectOpGradients({img}, [&] { return Flatten(img); });
}

TEST(OpsTest, BatchNormGradientsInBothModes) {
  Rng rng(3);
  Tensor x = RandomTensor({3, 2, 4}, rng, true);
  Tensor g = RandomTensor({2}, rng, true), b = RandomTensor({2}, rng, true);
  Tensor rm = Zeros({2}), rv = MakeTensor({2}, {1.5, 0.5});
  ExpectOpGradients({x, g, b}, [&] { return BatchNorm(x, g, b, rm, rv, true); });
  ExpectOpGradients({x, g, b}, [&] { return BatchNorm(x, g, b, rm, rv, false); });
}

TEST(OpsTest, BatchNormTrainingNormalizesAndUpdatesRunningStats) {
  Tensor x = MakeTensor({4, 1}, {1, 2, 3, 4});
  Tensor g = MakeTensor({1}, {1.0}), b = MakeTensor({1}, {0.0});
  Tensor rm = Zeros({1}), rv = MakeTensor({1}, {1.0});
  Tensor y = BatchNorm(x, g, b, rm, rv, true, 0.1, 0.0);
  const double sd = std::sqrt(1.25);
  EXPECT_NEAR(y->value[0], -1.5 / sd, 1e-12);
  EXPECT_NEAR(y->value[3], 1.5 / sd, 1e-12);
  EXPECT_NEAR(rm->value[0], 0.25, 1e-12);
  EXPECT_NEAR(rv->value[0], 0.9 + 0.1 * (5.0 / 3.0), 1e-12);
}

TEST(OpsTest, PoolingAndMfmValues) {
  Tensor x = MakeTensor({1, 2, 4}, {1, 5, 2, 0, /*c1*/ 3, 1, 4, -1});
  EXPECT_EQ(MaxPool1d(x, 2)->value, (std::vector<double>{5, 2, 3, 4}));
  EXPECT_EQ(MaxPool1d(x, 9)->shape, (Shape{1, 2, 1}));
  EXPECT_EQ(Mfm(x)->value, (std::vector<double>{3, 5, 4, 0}));
  Tensor sp = StatsPool(MakeTensor({1, 1, 2}, {1, 3}));
  EXPECT_DOUBLE_EQ(sp->value[0], 2.0);
  EXPECT_NEAR(sp->value[1], std::sqrt(1.0 + 1e-5), 1e-15);
  EXPECT_THROW(Mfm(MakeTensor({1, 3}, {1, 2, 3})), ValidationError);
}

TEST(OpsTest, BceExamples) {
  EXPECT_NEAR(Bce(1.0, 1.0), -std::log(1.0 - 1e-7), 1e-15);
  EXPECT_LT(Bce(1.0, 1.0), 1e-6);
  EXPECT_NEAR(Bce(1.0, 0.5), std::log(2.0), 1e-15);
  EXPECT_NEAR(Bce(0.0, 0.5), std::log(2.0), 1e-15);
  EXPECT_TRUE(std::isfinite(Bce(1.0, 0.0)));
  EXPECT_NEAR(Bce(1.0, 0.0), -std::log(1e-7), 1e-9);
  Tensor p = MakeTensor({2, 1}, {0.5, 0.25});
  EXPECT_NEAR(BceLoss(p, {1.0, 0.0})->value[0], 0.5 * (std::log(2.0) - std::log(0.75)), 1e-15);
  EXPECT_THROW(BceLoss(p, {1.0}), ValidationError);
}

TEST(OpsTest, NoGradGuardSkipsTape) {
  Rng rng(4);
  Tensor w = RandomTensor({2, 3}, rng, true);
  {
    NoGradGuard guard;
    Tensor y = Linear(RandomTensor({1, 3}, rng), w, nullptr);
    EXPECT_FALSE(y->requires_grad);
  }
  EXPECT_TRUE(Linear(RandomTensor({1, 3}, rng), w, nullptr)->requires_grad);
}

TEST(OpsTest, GraphKeepsConstantInputsAlive) {
  Rng rng(5);
  Tensor w = RandomTensor({1, 1, 3, 3}, rng, true);
  Tensor y = Conv2d(RandomTensor({1, 1, 4, 4}, rng), w, nullptr, 1, 1);
  Tensor expected_input = y->parents.front();
  ASSERT_EQ(expected_input->shape, (Shape{1, 1, 4, 4}));
  Backward(BceLoss(Sigmoid(GlobalAvgPool(y)), {1.0}));
  double dot = 0.0;
  for (double g : w->grad) dot += std::abs(g);
  EXPECT_GT(dot, 0.0);
}

BackboneSpec SmallSpec(BackboneKind kind) {
  BackboneSpec s = BackboneSpec::For(kind);
  s.channels = 2;
  s.input_frames = 24;
  s.feature_width = 12;
  s.raw_samples = 1200;
  return s;
}

Tensor AudioBatch(const BackboneSpec& spec, int batch, Rng& rng) {
  Shape shape{batch};
  for (int d : spec.SampleShape()) shape.push_back(d);
  return RandomTensor(shape, rng);
}

TEST(ModelTest, PinnedDimsPerBackbone) {
  const struct {
    BackboneKind kind;
    int feat;
    int ctx;
  } expected[] = {{BackboneKind::kRawNet3, 3072, 384},
                  {BackboneKind::kLcnn, 768, 128},
                  {BackboneKind::kMesoNet, 16, 6},
                  {BackboneKind::kSpecRNet, 128, 64}};
  for (const auto& e : expected) {
    const BackboneSpec s = BackboneSpec::For(e.kind);
    EXPECT_EQ(s.feat_dim, e.feat);
    EXPECT_EQ(s.ctx_out_dim, e.ctx);
    BackboneSpec bad = s;
    bad.feat_dim += 1;
    EXPECT_THROW(bad.Validate(), ValidationError);
  }
  EXPECT_THROW(ParseBackboneKind("resnet"), ValidationError);
}

TEST(ModelTest, ForwardShapesAndRange) {
  Rng rng(5);
  for (BackboneKind kind :
       {BackboneKind::kRawNet3, BackboneKind::kLcnn, BackboneKind::kMesoNet, BackboneKind::kSpecRNet}) {
    const BackboneSpec spec = SmallSpec(kind);
    CaddModel model(spec, Variant::kTPlusC, 0);
    EXPECT_EQ(model.concat_width(), spec.feat_dim + spec.ctx_out_dim);
    EXPECT_EQ(model.fusion()->fusion_widths(), (std::vector<int>{spec.feat_dim + spec.ctx_out_dim, spec.feat_dim,
                                                                 spec.feat_dim}));
    EXPECT_EQ(model.encoder()->block_count(), 4u);
    Tensor audio = AudioBatch(spec, 3, rng);
    EXPECT_EQ(model.backbone().Forward(audio)->shape, (Shape{3, spec.feat_dim}));
    Tensor p = model.Forward(audio, RandomTensor({3, 100}, rng));
    ASSERT_EQ(p->shape, (Shape{3, 1}));
    for (double v : p->value) {
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
  }
}

TEST(ModelTest, RawNet3ConcatWidthIs3456) {
  CaddModel model(SmallSpec(BackboneKind::kRawNet3), Variant::kC, 0);
  EXPECT_EQ(model.concat_width(), 3456);
}

TEST(ModelTest, ZeroWeightsGiveOneHalf) {
  Rng rng(6);
  const BackboneSpec spec = SmallSpec(BackboneKind::kMesoNet);
  CaddModel model(spec, Variant::kT, 0);
  for (auto& [name, t] : model.NamedParameters()) std::fill(t->value.begin(), t->value.end(), 0.0);
  for (double v : model.Predict(AudioBatch(spec, 2, rng), RandomTensor({2, 100}, rng))) EXPECT_EQ(v, 0.5);
}

TEST(ModelTest, BaselineIgnoresContextBitwise) {
  Rng rng(7);
  const BackboneSpec spec = SmallSpec(BackboneKind::kLcnn);
  CaddModel model(spec, Variant::kBaseline, 3);
  EXPECT_EQ(model.encoder(), nullptr);
  Tensor audio = AudioBatch(spec, 2, rng);
  const auto a = model.Predict(audio, RandomTensor({2, 100}, rng));
  const auto b = model.Predict(audio, RandomTensor({2, 100}, rng, false, 50.0));
  const auto c = model.Predict(audio, nullptr);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(ModelTest, ShapeErrorsNameTheStage) {
  Rng rng(8);
  const BackboneSpec spec = SmallSpec(BackboneKind::kSpecRNet);
  CaddModel model(spec, Variant::kC, 0);
  try {
    model.Forward(AudioBatch(spec, 2, rng), RandomTensor({2, 99}, rng));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("context encoder"), std::string::npos) << e.what();
  }
  try {
    model.Forward(RandomTensor({2, 1, 10, 12}, rng), RandomTensor({2, 100}, rng));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("backbone"), std::string::npos) << e.what();
  }
  EXPECT_THROW(model.Forward(AudioBatch(spec, 2, rng), nullptr), ValidationError);
}

TEST(ModelTest, EvalModeIsDeterministic) {
  Rng rng(9);
  const BackboneSpec spec = SmallSpec(BackboneKind::kRawNet3);
  CaddModel model(spec, Variant::kTPlusC, 1);
  Tensor audio = AudioBatch(spec, 2, rng);
  Tensor ctx = RandomTensor({2, 100}, rng);
  EXPECT_EQ(model.Predict(audio, ctx), model.Predict(audio, ctx));
  CaddModel twin(spec, Variant::kTPlusC, 1);
  EXPECT_EQ(StateHash(model), StateHash(twin));
}

// Every coordinate of every parameter on the smallest configuration.
TEST(ModelTest, ExhaustiveGradientCheckTinyModel) {
  Rng rng(10);
  BackboneSpec spec = SmallSpec(BackboneKind::kMesoNet);
  spec.input_frames = 8;
  spec.feature_width = 8;
  CaddModel model(spec, Variant::kTPlusC, 2);
  const GradCheckResult r =
      CheckGradients(model, AudioBatch(spec, 3, rng), RandomTensor({3, 100}, rng), {1.0, 0.0, 1.0});
  EXPECT_EQ(r.coords_checked, model.ParameterCount());
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_parameter << "[" << r.worst_index << "]";
}

TEST(ModelTest, SampledGradientCheckEveryBackbone) {
  Rng rng(11);
  for (BackboneKind kind :
       {BackboneKind::kRawNet3, BackboneKind::kLcnn, BackboneKind::kMesoNet, BackboneKind::kSpecRNet}) {
    const BackboneSpec spec = SmallSpec(kind);
    CaddModel model(spec, Variant::kBaseline, 4);
    GradCheckOptions opts;
    opts.max_coords_per_tensor = 3;
    const GradCheckResult r = CheckGradients(model, AudioBatch(spec, 3, rng), nullptr, {0.0, 1.0, 1.0}, opts);
    EXPECT_LT(r.max_rel_error, 1e-4) << BackboneKindName(kind) << " " << r.worst_parameter;
  }
}

TEST(CheckpointTest, RoundTripIsBitwise) {
  testing::TempDir dir;
  Rng rng(12);
  const BackboneSpec spec = SmallSpec(BackboneKind::kLcnn);
  CaddModel model(spec, Variant::kTPlusC, 5);
  // Make the running statistics non-trivial.
  model.Forward(AudioBatch(spec, 4, rng), RandomTensor({4, 100}, rng));
  SaveCheckpoint(dir / "m.ckpt", model, "abc123", {{"epoch", 7}});
  nlohmann::json header;
  auto loaded = LoadCheckpoint(dir / "m.ckpt", &header);
  EXPECT_EQ(header["config_hash"], "abc123");
  EXPECT_EQ(header["variant"], "T+C");
  EXPECT_EQ(header["extra"]["epoch"], 7);
  EXPECT_EQ(loaded->spec().ToJson(), spec.ToJson());
  EXPECT_EQ(StateHash(*loaded), StateHash(model));
  Tensor audio = AudioBatch(spec, 2, rng);
  Tensor ctx = RandomTensor({2, 100}, rng);
  EXPECT_EQ(loaded->Predict(audio, ctx), model.Predict(audio, ctx));
}

TEST(CheckpointTest, RejectsForeignFiles) {
  testing::TempDir dir;
  WriteFileAtomic(dir / "bad.ckpt", "not a checkpoint at all");
  EXPECT_THROW(LoadCheckpoint(dir / "bad.ckpt"), ParseError);
  EXPECT_THROW(LoadCheckpoint(dir / "missing.ckpt"), EnvironmentError);
}

}  // namespace
}  // namespace cadd::nn
