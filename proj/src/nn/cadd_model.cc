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

#include "cadd/nn/cadd_model.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cadd/common/error.h"
#include "cadd/common/hash.h"
#include "cadd/common/io.h"
#include "cadd/nn/ops.h"

namespace cadd::nn {

ContextEncoder::ContextEncoder(int out_dim, Rng& rng) {
  const int widths[5] = {kContextInputWidth, 128, 128, 128, out_dim};
  for (int i = 0; i < 4; ++i) {
    blocks_.push_back(RegisterModule("block" + std::to_string(i + 1),
                                     std::make_shared<LinearLayer>(widths[i], widths[i + 1], rng)));
  }
}

Tensor ContextEncoder::Forward(const Tensor& x) const {
  if (x->shape.size() != 2 || x->dim(1) != kContextInputWidth) {
    throw ValidationError("context encoder: expected [B, " + std::to_string(kContextInputWidth) + "], got " +
                          ShapeString(x->shape));
  }
  Tensor h = x;
  for (const auto& b : blocks_) h = LeakyRelu(b->Forward(h), kLeakySlope);
  return h;
}

FusionHead::FusionHead(int in_dim, int feat_dim, Rng& rng) {
  fusion_.push_back(RegisterModule("fusion1", std::make_shared<LinearLayer>(in_dim, feat_dim, rng)));
  fusion_.push_back(RegisterModule("fusion2", std::make_shared<LinearLayer>(feat_dim, feat_dim, rng)));
  head_ = RegisterModule("head", std::make_shared<LinearLayer>(feat_dim, 1, rng));
}

Tensor FusionHead::Forward(const Tensor& x) const {
  if (x->shape.size() != 2 || x->dim(1) != in_dim()) {
    throw ValidationError("fusion: expected [B, " + std::to_string(in_dim()) + "], got " + ShapeString(x->shape));
  }
  Tensor h = x;
  for (const auto& f : fusion_) h = LeakyRelu(f->Forward(h), kLeakySlope);
  return head_->Forward(h);
}

std::vector<int> FusionHead::fusion_widths() const {
  return {fusion_[0]->in(), fusion_[0]->out(), fusion_[1]->out()};
}

CaddModel::CaddModel(const BackboneSpec& spec, Variant variant, std::uint64_t seed)
    : spec_(spec), variant_(variant), seed_(seed) {
  Rng rng(seed);
  backbone_ = RegisterModule("backbone", BuildBackbone(spec, rng));
  if (variant == Variant::kBaseline) {
    baseline_head_ = RegisterModule("head", std::make_shared<LinearLayer>(spec.feat_dim, 1, rng));
  } else {
    encoder_ = RegisterModule("context_encoder", std::make_shared<ContextEncoder>(spec.ctx_out_dim, rng));
    fusion_ = RegisterModule("fusion", std::make_shared<FusionHead>(spec.ctx_out_dim + spec.feat_dim, spec.feat_dim, rng));
  }
}

int CaddModel::concat_width() const { return fusion_ ? fusion_->in_dim() : spec_.feat_dim; }

Tensor CaddModel::Forward(const Tensor& audio, const Tensor& context) const {
  Tensor features = backbone_->Forward(audio);
  if (variant_ == Variant::kBaseline) return Sigmoid(baseline_head_->Forward(features));
  if (!context) throw ValidationError("context encoder: side input required for variant " + std::string(VariantName(variant_)));
  if (context->shape.size() != 2 || context->dim(0) != audio->dim(0)) {
    throw ValidationError("context encoder: batch of " + ShapeString(context->shape) + " does not match audio " +
                          ShapeString(audio->shape));
  }
  // Encoded context first, then backbone features.
  return Sigmoid(fusion_->Forward(Concat(encoder_->Forward(context), features)));
}

std::vector<double> CaddModel::Predict(const Tensor& audio, const Tensor& context) {
  const bool was_training = training();
  SetTraining(false);
  NoGradGuard guard;
  Tensor p = Forward(audio, context);
  SetTraining(was_training);
  return p->value;
}

namespace {

constexpr char kMagic[8] = {'C', 'A', 'D', 'D', 'C', 'K', 'P', 'T'};
constexpr int kFormatVersion = 1;

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutF64(std::string& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

double GetF64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return std::bit_cast<double>(v);
}

struct RawCheckpoint {
  nlohmann::json header;
  std::string payload;
};

RawCheckpoint ReadRaw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EnvironmentError("cannot open checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw ParseError(path.string() + ": not a checkpoint file");
  }
  std::uint32_t len = 0;
  for (int i = 3; i >= 0; --i) len = (len << 8) | static_cast<unsigned char>(bytes[8 + i]);
  if (bytes.size() < 12 + static_cast<std::size_t>(len)) throw ParseError(path.string() + ": truncated header");
  RawCheckpoint raw;
  try {
    raw.header = nlohmann::json::parse(bytes.substr(12, len));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": bad header: " + e.what());
  }
  raw.payload = bytes.substr(12 + len);
  return raw;
}

}  // namespace

void SaveCheckpoint(const std::filesystem::path& path, const CaddModel& model, const std::string& config_hash,
                    const nlohmann::json& extra) {
  nlohmann::json table = nlohmann::json::array();
  std::string payload;
  for (const auto& [name, t] : model.StateDict()) {
    table.push_back({{"name", name}, {"shape", t->shape}});
    for (double v : t->value) PutF64(payload, v);
  }
  const nlohmann::json header = {{"format_version", kFormatVersion},
                                 {"config_hash", config_hash},
                                 {"variant", VariantName(model.variant())},
                                 {"seed", model.seed()},
                                 {"backbone", model.spec().ToJson()},
                                 {"tensors", table},
                                 {"extra", extra}};
  const std::string h = header.dump();
  std::string bytes(kMagic, 8);
  PutU32(bytes, static_cast<std::uint32_t>(h.size()));
  bytes += h;
  bytes += payload;
  WriteFileAtomic(path, bytes);
}

nlohmann::json ReadCheckpointHeader(const std::filesystem::path& path) { return ReadRaw(path).header; }

std::unique_ptr<CaddModel> LoadCheckpoint(const std::filesystem::path& path, nlohmann::json* header) {
  RawCheckpoint raw = ReadRaw(path);
  const nlohmann::json& h = raw.header;
  if (h.value("format_version", 0) != kFormatVersion) throw ParseError(path.string() + ": unsupported version");
  auto model = std::make_unique<CaddModel>(BackboneSpec::FromJson(h.at("backbone")),
                                           ParseVariant(h.at("variant").get<std::string>()),
                                           h.value("seed", std::uint64_t{0}));
  const NamedTensors state = model->StateDict();
  const auto& table = h.at("tensors");
  if (table.size() != state.size()) throw ParseError(path.string() + ": tensor count mismatch");
  std::size_t offset = 0;
  const auto* p = reinterpret_cast<const unsigned char*>(raw.payload.data());
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto& [name, t] = state[i];
    if (table[i].at("name").get<std::string>() != name || table[i].at("shape").get<Shape>() != t->shape) {
      throw ParseError(path.string() + ": tensor " + std::to_string(i) + " does not match " + name);
    }
    if ((offset + t->numel()) * 8 > raw.payload.size()) throw ParseError(path.string() + ": truncated payload");
    for (std::size_t k = 0; k < t->numel(); ++k) t->value[k] = GetF64(p + (offset + k) * 8);
    offset += t->numel();
  }
  if (header != nullptr) *header = h;
  return model;
}

void CopyState(const CaddModel& from, CaddModel& to) {
  const NamedTensors a = from.StateDict();
  const NamedTensors b = to.StateDict();
  if (a.size() != b.size()) throw ValidationError("copy state: structure differs");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].first != b[i].first || a[i].second->shape != b[i].second->shape) {
      throw ValidationError("copy state: tensor " + a[i].first + " differs");
    }
    b[i].second->value = a[i].second->value;
  }
}

std::string StateHash(const Module& module) {
  std::uint64_t h = Fnv1a64(std::string_view{});
  for (const auto& [name, t] : module.StateDict()) {
    h = Fnv1a64(name, h);
    h = Fnv1a64(std::span<const double>(t->value), h);
  }
  return HexDigest(h);
}

}  // namespace cadd::nn
