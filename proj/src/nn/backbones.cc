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

#include "cadd/nn/backbones.h"

#include <algorithm>
#include <cctype>

#include "cadd/common/error.h"
#include "cadd/nn/ops.h"

namespace cadd::nn {

std::string_view BackboneKindName(BackboneKind kind) {
  switch (kind) {
    case BackboneKind::kRawNet3:
      return "rawnet3";
    case BackboneKind::kLcnn:
      return "lcnn";
    case BackboneKind::kMesoNet:
      return "mesonet";
    case BackboneKind::kSpecRNet:
      return "specrnet";
  }
  return "unknown";
}

BackboneKind ParseBackboneKind(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "rawnet3" || s == "rawnet") return BackboneKind::kRawNet3;
  if (s == "lcnn") return BackboneKind::kLcnn;
  if (s == "mesonet" || s == "meso4") return BackboneKind::kMesoNet;
  if (s == "specrnet") return BackboneKind::kSpecRNet;
  throw ValidationError("unsupported backbone: " + std::string(text));
}

int BackboneSpec::PinnedFeatDim(BackboneKind kind) {
  switch (kind) {
    case BackboneKind::kRawNet3:
      return 3072;
    case BackboneKind::kLcnn:
      return 768;
    case BackboneKind::kMesoNet:
      return 16;
    case BackboneKind::kSpecRNet:
      return 128;
  }
  throw ValidationError("unsupported backbone");
}

int BackboneSpec::PinnedCtxOutDim(BackboneKind kind) {
  switch (kind) {
    case BackboneKind::kRawNet3:
      return 384;
    case BackboneKind::kLcnn:
      return 128;
    case BackboneKind::kMesoNet:
      return 6;
    case BackboneKind::kSpecRNet:
      return 64;
  }
  throw ValidationError("unsupported backbone");
}

BackboneSpec BackboneSpec::For(BackboneKind kind) {
  BackboneSpec s;
  s.kind = kind;
  s.feat_dim = PinnedFeatDim(kind);
  s.ctx_out_dim = PinnedCtxOutDim(kind);
  return s;
}

Shape BackboneSpec::SampleShape() const {
  if (raw_audio()) return {1, raw_samples};
  return {1, input_frames, feature_width};
}

void BackboneSpec::Validate() const {
  const std::string name(BackboneKindName(kind));
  if (feat_dim != PinnedFeatDim(kind) || ctx_out_dim != PinnedCtxOutDim(kind)) {
    throw ValidationError(name + ": dims (" + std::to_string(feat_dim) + ", " + std::to_string(ctx_out_dim) +
                          ") differ from the fixed (" + std::to_string(PinnedFeatDim(kind)) + ", " +
                          std::to_string(PinnedCtxOutDim(kind)) + ")");
  }
  if (channels < 2 || channels % 2 != 0) throw ValidationError(name + ": channels must be even and >= 2");
  if (raw_audio()) {
    if (raw_samples < 31 * 10) throw ValidationError(name + ": raw_samples too small");
  } else if (input_frames < 1 || feature_width < 1) {
    throw ValidationError(name + ": empty feature geometry");
  }
}

nlohmann::json BackboneSpec::ToJson() const {
  return {{"kind", BackboneKindName(kind)}, {"feat_dim", feat_dim},       {"ctx_out_dim", ctx_out_dim},
          {"channels", channels},           {"input_frames", input_frames}, {"feature_width", feature_width},
          {"raw_samples", raw_samples}};
}

BackboneSpec BackboneSpec::FromJson(const nlohmann::json& j) {
  BackboneSpec s = For(ParseBackboneKind(j.at("kind").get<std::string>()));
  s.feat_dim = j.value("feat_dim", s.feat_dim);
  s.ctx_out_dim = j.value("ctx_out_dim", s.ctx_out_dim);
  s.channels = j.value("channels", s.channels);
  s.input_frames = j.value("input_frames", s.input_frames);
  s.feature_width = j.value("feature_width", s.feature_width);
  s.raw_samples = j.value("raw_samples", s.raw_samples);
  s.Validate();
  return s;
}

Tensor Backbone::Forward(const Tensor& x) const {
  Shape want = spec_.SampleShape();
  Shape got(x->shape.begin() + std::min<std::size_t>(1, x->shape.size()), x->shape.end());
  if (x->shape.size() != want.size() + 1 || got != want) {
    throw ValidationError(std::string("backbone ") + std::string(BackboneKindName(spec_.kind)) +
                          ": expected input [B" + ShapeString(want).replace(0, 1, ", ") + ", got " +
                          ShapeString(x->shape));
  }
  Tensor y = Run(x);
  if (y->shape != Shape{x->dim(0), spec_.feat_dim}) {
    throw ValidationError("backbone produced " + ShapeString(y->shape));
  }
  return y;
}

namespace {

// conv/MFM stack with batch norm, max pooling and a 1536 -> 768 MFM head.
class Lcnn : public Backbone {
 public:
  Lcnn(const BackboneSpec& spec, Rng& rng) : Backbone(spec) {
    const int c = spec.channels;
    conv1_ = RegisterModule("conv1", std::make_shared<Conv2dLayer>(1, 2 * c, 5, rng));
    conv2a_ = RegisterModule("conv2a", std::make_shared<Conv2dLayer>(c, 2 * c, 1, rng));
    bn2a_ = RegisterModule("bn2a", std::make_shared<BatchNormLayer>(c));
    conv2b_ = RegisterModule("conv2b", std::make_shared<Conv2dLayer>(c, 4 * c, 3, rng));
    bn2b_ = RegisterModule("bn2b", std::make_shared<BatchNormLayer>(2 * c));
    conv3a_ = RegisterModule("conv3a", std::make_shared<Conv2dLayer>(2 * c, 4 * c, 1, rng));
    bn3a_ = RegisterModule("bn3a", std::make_shared<BatchNormLayer>(2 * c));
    conv3b_ = RegisterModule("conv3b", std::make_shared<Conv2dLayer>(2 * c, 4 * c, 3, rng));
    fc_ = RegisterModule("fc", std::make_shared<LinearLayer>(2 * c * kPoolH * kPoolW, 2 * spec.feat_dim, rng));
  }

 protected:
  Tensor Run(const Tensor& x) const override {
    Tensor h = MaxPool2d(Mfm(conv1_->Forward(x)), 2, 2);
    h = bn2a_->Forward(Mfm(conv2a_->Forward(h)));
    h = bn2b_->Forward(MaxPool2d(Mfm(conv2b_->Forward(h)), 2, 2));
    h = bn3a_->Forward(Mfm(conv3a_->Forward(h)));
    h = MaxPool2d(Mfm(conv3b_->Forward(h)), 2, 2);
    h = Flatten(AdaptiveAvgPool2d(h, kPoolH, kPoolW));
    return Mfm(fc_->Forward(h));
  }

 private:
  static constexpr int kPoolH = 4;
  static constexpr int kPoolW = 2;
  std::shared_ptr<Conv2dLayer> conv1_, conv2a_, conv2b_, conv3a_, conv3b_;
  std::shared_ptr<BatchNormLayer> bn2a_, bn2b_, bn3a_;
  std::shared_ptr<LinearLayer> fc_;
};

// Four conv-ReLU-BN-pool blocks and a 16-unit dense layer.
class MesoNet : public Backbone {
 public:
  MesoNet(const BackboneSpec& spec, Rng& rng) : Backbone(spec) {
    const int c = spec.channels;
    const int widths[5] = {1, c, c, 2 * c, 2 * c};
    const int kernels[4] = {3, 5, 5, 5};
    for (int i = 0; i < 4; ++i) {
      const std::string n = std::to_string(i + 1);
      convs_.push_back(RegisterModule("conv" + n, std::make_shared<Conv2dLayer>(widths[i], widths[i + 1], kernels[i], rng)));
      bns_.push_back(RegisterModule("bn" + n, std::make_shared<BatchNormLayer>(widths[i + 1])));
    }
    fc_ = RegisterModule("fc", std::make_shared<LinearLayer>(2 * c * 4, spec.feat_dim, rng));
  }

 protected:
  Tensor Run(const Tensor& x) const override {
    Tensor h = x;
    const int pools[4] = {2, 2, 2, 4};
    for (int i = 0; i < 4; ++i) {
      h = bns_[i]->Forward(Relu(convs_[i]->Forward(h)));
      h = MaxPool2d(h, pools[i], pools[i]);
    }
    h = Flatten(AdaptiveAvgPool2d(h, 2, 2));
    return LeakyRelu(fc_->Forward(h), 0.1);
  }

 private:
  std::vector<std::shared_ptr<Conv2dLayer>> convs_;
  std::vector<std::shared_ptr<BatchNormLayer>> bns_;
  std::shared_ptr<LinearLayer> fc_;
};

// Pre-activation residual block followed by pooling and feature map scaling.
class ResBlock2d : public Module {
 public:
  ResBlock2d(int in, int out, Rng& rng) {
    bn1_ = RegisterModule("bn1", std::make_shared<BatchNormLayer>(in));
    conv1_ = RegisterModule("conv1", std::make_shared<Conv2dLayer>(in, out, 3, rng));
    bn2_ = RegisterModule("bn2", std::make_shared<BatchNormLayer>(out));
    conv2_ = RegisterModule("conv2", std::make_shared<Conv2dLayer>(out, out, 3, rng));
    if (in != out) skip_ = RegisterModule("skip", std::make_shared<Conv2dLayer>(in, out, 1, rng));
    fms_ = RegisterModule("fms", std::make_shared<FmsLayer>(out, rng));
  }

  Tensor Forward(const Tensor& x) const {
    Tensor h = conv1_->Forward(LeakyRelu(bn1_->Forward(x), 0.3));
    h = conv2_->Forward(LeakyRelu(bn2_->Forward(h), 0.3));
    h = Add(h, skip_ ? skip_->Forward(x) : x);
    return fms_->Forward(MaxPool2d(h, 2, 2));
  }

 private:
  std::shared_ptr<BatchNormLayer> bn1_, bn2_;
  std::shared_ptr<Conv2dLayer> conv1_, conv2_, skip_;
  std::shared_ptr<FmsLayer> fms_;
};

class SpecRNet : public Backbone {
 public:
  SpecRNet(const BackboneSpec& spec, Rng& rng) : Backbone(spec) {
    const int c = spec.channels;
    stem_ = RegisterModule("stem", std::make_shared<Conv2dLayer>(1, c, 3, rng));
    stem_bn_ = RegisterModule("stem_bn", std::make_shared<BatchNormLayer>(c));
    blocks_.push_back(RegisterModule("block1", std::make_shared<ResBlock2d>(c, c, rng)));
    blocks_.push_back(RegisterModule("block2", std::make_shared<ResBlock2d>(c, 2 * c, rng)));
    blocks_.push_back(RegisterModule("block3", std::make_shared<ResBlock2d>(2 * c, 2 * c, rng)));
    fc_ = RegisterModule("fc", std::make_shared<LinearLayer>(2 * c, spec.feat_dim, rng));
  }

 protected:
  Tensor Run(const Tensor& x) const override {
    Tensor h = LeakyRelu(stem_bn_->Forward(stem_->Forward(x)), 0.3);
    for (const auto& b : blocks_) h = b->Forward(h);
    return fc_->Forward(GlobalAvgPool(h));
  }

 private:
  std::shared_ptr<Conv2dLayer> stem_;
  std::shared_ptr<BatchNormLayer> stem_bn_;
  std::vector<std::shared_ptr<ResBlock2d>> blocks_;
  std::shared_ptr<LinearLayer> fc_;
};

class ResBlock1d : public Module {
 public:
  ResBlock1d(int in, int out, Rng& rng) {
    conv1_ = RegisterModule("conv1", std::make_shared<Conv1dLayer>(in, out, 3, 1, 1, rng));
    bn1_ = RegisterModule("bn1", std::make_shared<BatchNormLayer>(out));
    conv2_ = RegisterModule("conv2", std::make_shared<Conv1dLayer>(out, out, 3, 1, 1, rng));
    bn2_ = RegisterModule("bn2", std::make_shared<BatchNormLayer>(out));
    if (in != out) skip_ = RegisterModule("skip", std::make_shared<Conv1dLayer>(in, out, 1, 1, 0, rng));
    fms_ = RegisterModule("fms", std::make_shared<FmsLayer>(out, rng));
  }

  Tensor Forward(const Tensor& x) const {
    Tensor h = LeakyRelu(bn1_->Forward(conv1_->Forward(x)), 0.3);
    h = bn2_->Forward(conv2_->Forward(h));
    h = LeakyRelu(Add(h, skip_ ? skip_->Forward(x) : x), 0.3);
    return fms_->Forward(MaxPool1d(h, 3));
  }

 private:
  std::shared_ptr<Conv1dLayer> conv1_, conv2_, skip_;
  std::shared_ptr<BatchNormLayer> bn1_, bn2_;
  std::shared_ptr<FmsLayer> fms_;
};

// Raw-waveform front end (strided conv, log magnitude, mean normalization),
// residual blocks with FMS, 1x1 expansion to 1536 and mean/std pooling.
class RawNet3 : public Backbone {
 public:
  RawNet3(const BackboneSpec& spec, Rng& rng) : Backbone(spec) {
    const int c = spec.channels;
    frontend_ = RegisterModule("frontend", std::make_shared<Conv1dLayer>(1, c, 31, 10, 0, rng));
    frontend_bn_ = RegisterModule("frontend_bn", std::make_shared<BatchNormLayer>(c));
    blocks_.push_back(RegisterModule("block1", std::make_shared<ResBlock1d>(c, c, rng)));
    blocks_.push_back(RegisterModule("block2", std::make_shared<ResBlock1d>(c, 2 * c, rng)));
    blocks_.push_back(RegisterModule("block3", std::make_shared<ResBlock1d>(2 * c, 2 * c, rng)));
    expand_ = RegisterModule("expand", std::make_shared<Conv1dLayer>(2 * c, spec.feat_dim / 2, 1, 1, 0, rng));
  }

 protected:
  Tensor Run(const Tensor& x) const override {
    Tensor h = MeanNormalize(Log(Abs(frontend_->Forward(x)), 1e-6));
    h = frontend_bn_->Forward(h);
    for (const auto& b : blocks_) h = b->Forward(h);
    return StatsPool(Relu(expand_->Forward(h)));
  }

 private:
  std::shared_ptr<Conv1dLayer> frontend_;
  std::shared_ptr<BatchNormLayer> frontend_bn_;
  std::vector<std::shared_ptr<ResBlock1d>> blocks_;
  std::shared_ptr<Conv1dLayer> expand_;
};

}  // namespace

std::shared_ptr<Backbone> BuildBackbone(const BackboneSpec& spec, Rng& rng) {
  spec.Validate();
  switch (spec.kind) {
    case BackboneKind::kRawNet3:
      return std::make_shared<RawNet3>(spec, rng);
    case BackboneKind::kLcnn:
      return std::make_shared<Lcnn>(spec, rng);
    case BackboneKind::kMesoNet:
      return std::make_shared<MesoNet>(spec, rng);
    case BackboneKind::kSpecRNet:
      return std::make_shared<SpecRNet>(spec, rng);
  }
  throw ValidationError("unsupported backbone");
}

}  // namespace cadd::nn
