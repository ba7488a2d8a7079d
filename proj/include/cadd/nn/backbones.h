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

#ifndef CADD_NN_BACKBONES_H_
#define CADD_NN_BACKBONES_H_

#include <memory>
#include <string>
#include <string_view>

#include "cadd/common/random.h"
#include "cadd/nn/module.h"
#include "json.hpp"

namespace cadd::nn {

enum class BackboneKind { kRawNet3, kLcnn, kMesoNet, kSpecRNet };

std::string_view BackboneKindName(BackboneKind kind);
BackboneKind ParseBackboneKind(std::string_view text);

// Headless detector description. feat_dim and ctx_out_dim are fixed per
// kind; the channel width and input geometry are free.
struct BackboneSpec {
  BackboneKind kind = BackboneKind::kLcnn;
  int feat_dim = 768;
  int ctx_out_dim = 128;
  int channels = 8;         // base width, must be even
  int input_frames = 98;    // feature backbones: frames per example
  int feature_width = 20;   // feature backbones: coefficients per frame
  int raw_samples = 16000;  // RawNet3: samples per example

  static BackboneSpec For(BackboneKind kind);
  static int PinnedFeatDim(BackboneKind kind);
  static int PinnedCtxOutDim(BackboneKind kind);

  bool raw_audio() const { return kind == BackboneKind::kRawNet3; }
  // Per-example input shape, without the batch axis.
  Shape SampleShape() const;
  void Validate() const;

  nlohmann::json ToJson() const;
  static BackboneSpec FromJson(const nlohmann::json& j);
};

class Backbone : public Module {
 public:
  explicit Backbone(BackboneSpec spec) : spec_(std::move(spec)) {}
  // x: [B, ...SampleShape()] -> [B, feat_dim]
  Tensor Forward(const Tensor& x) const;
  const BackboneSpec& spec() const { return spec_; }

 protected:
  virtual Tensor Run(const Tensor& x) const = 0;

 private:
  BackboneSpec spec_;
};

std::shared_ptr<Backbone> BuildBackbone(const BackboneSpec& spec, Rng& rng);

}  // namespace cadd::nn

#endif  // CADD_NN_BACKBONES_H_
