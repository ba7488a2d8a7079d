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

#ifndef CADD_NN_CADD_MODEL_H_
#define CADD_NN_CADD_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "cadd/common/variant.h"
#include "cadd/nn/backbones.h"
#include "cadd/nn/module.h"
#include "json.hpp"

namespace cadd::nn {

inline constexpr int kContextInputWidth = 100;
inline constexpr double kLeakySlope = 0.1;

// Four linear + LeakyReLU blocks: 100 -> 128 -> 128 -> 128 -> out.
class ContextEncoder : public Module {
 public:
  ContextEncoder(int out_dim, Rng& rng);
  Tensor Forward(const Tensor& x) const;
  std::size_t block_count() const { return blocks_.size(); }

 private:
  std::vector<std::shared_ptr<LinearLayer>> blocks_;
};

// Two fusion blocks (in -> feat -> feat) and a single-logit head.
class FusionHead : public Module {
 public:
  FusionHead(int in_dim, int feat_dim, Rng& rng);
  Tensor Forward(const Tensor& x) const;  // returns logits [B, 1]
  int in_dim() const { return fusion_[0]->in(); }
  std::vector<int> fusion_widths() const;

 private:
  std::vector<std::shared_ptr<LinearLayer>> fusion_;
  std::shared_ptr<LinearLayer> head_;
};

class CaddModel : public Module {
 public:
  CaddModel(const BackboneSpec& spec, Variant variant, std::uint64_t seed);

  // audio [B, ...spec.SampleShape()], context [B, 100] (ignored for the
  // baseline, may be null there). Returns probabilities [B, 1].
  Tensor Forward(const Tensor& audio, const Tensor& context) const;
  // Eval-mode, no-grad probabilities.
  std::vector<double> Predict(const Tensor& audio, const Tensor& context);

  const BackboneSpec& spec() const { return spec_; }
  Variant variant() const { return variant_; }
  std::uint64_t seed() const { return seed_; }
  bool uses_side_input() const { return variant_ != Variant::kBaseline; }
  int concat_width() const;

  const Backbone& backbone() const { return *backbone_; }
  const ContextEncoder* encoder() const { return encoder_.get(); }
  const FusionHead* fusion() const { return fusion_.get(); }

 private:
  BackboneSpec spec_;
  Variant variant_;
  std::uint64_t seed_;
  std::shared_ptr<Backbone> backbone_;
  std::shared_ptr<ContextEncoder> encoder_;
  std::shared_ptr<FusionHead> fusion_;
  std::shared_ptr<LinearLayer> baseline_head_;
};

// Binary container: "CADDCKPT", little-endian u32 header length, JSON
// header (variant, backbone spec, config hash, tensor table), then the
// tensors as little-endian float64 in table order.
void SaveCheckpoint(const std::filesystem::path& path, const CaddModel& model, const std::string& config_hash,
                    const nlohmann::json& extra = nlohmann::json::object());
nlohmann::json ReadCheckpointHeader(const std::filesystem::path& path);
// Rebuilds the model described by the header and loads every tensor.
std::unique_ptr<CaddModel> LoadCheckpoint(const std::filesystem::path& path, nlohmann::json* header = nullptr);
// Copies tensors between structurally identical models.
void CopyState(const CaddModel& from, CaddModel& to);
// Stable digest of every parameter and buffer value.
std::string StateHash(const Module& module);

}  // namespace cadd::nn

#endif  // CADD_NN_CADD_MODEL_H_
