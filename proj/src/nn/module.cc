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

#include "cadd/nn/module.h"

#include <cmath>

#include "cadd/nn/ops.h"

namespace cadd::nn {

void Module::Collect(const std::string& prefix, bool buffers, NamedTensors* out) const {
  for (const auto& [name, t] : buffers ? buffers_ : parameters_) out->emplace_back(prefix + name, t);
  for (const auto& [name, child] : children_) child->Collect(prefix + name + ".", buffers, out);
}

NamedTensors Module::NamedParameters() const {
  NamedTensors out;
  Collect("", false, &out);
  return out;
}

NamedTensors Module::NamedBuffers() const {
  NamedTensors out;
  Collect("", true, &out);
  return out;
}

NamedTensors Module::StateDict() const {
  NamedTensors out = NamedParameters();
  for (auto& b : NamedBuffers()) out.push_back(std::move(b));
  return out;
}

std::size_t Module::ParameterCount() const {
  std::size_t n = 0;
  for (const auto& [name, t] : NamedParameters()) n += t->numel();
  return n;
}

void Module::SetTraining(bool training) {
  training_ = training;
  for (auto& [name, child] : children_) child->SetTraining(training);
}

void Module::ZeroGrad() {
  for (auto& [name, t] : NamedParameters()) t->ZeroGrad();
}

void Module::Freeze() {
  for (auto& [name, t] : NamedParameters()) t->requires_grad = false;
}

Tensor Module::RegisterParameter(const std::string& name, Shape shape, std::vector<double> values) {
  Tensor t = MakeTensor(std::move(shape), std::move(values), true);
  parameters_.emplace_back(name, t);
  return t;
}

Tensor Module::RegisterBuffer(const std::string& name, Shape shape, std::vector<double> values) {
  Tensor t = MakeTensor(std::move(shape), std::move(values), false);
  buffers_.emplace_back(name, t);
  return t;
}

std::vector<double> KaimingUniform(std::size_t count, int fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / std::max(fan_in, 1));
  std::vector<double> v(count);
  for (double& x : v) x = rng.Uniform(-bound, bound);
  return v;
}

LinearLayer::LinearLayer(int in, int out, Rng& rng) : in_(in), out_(out) {
  weight_ = RegisterParameter("weight", {out, in}, KaimingUniform(static_cast<std::size_t>(in) * out, in, rng));
  bias_ = RegisterParameter("bias", {out}, std::vector<double>(out, 0.0));
}

Tensor LinearLayer::Forward(const Tensor& x) const { return Linear(x, weight_, bias_); }

Conv1dLayer::Conv1dLayer(int in_ch, int out_ch, int kernel, int stride, int padding, Rng& rng)
    : stride_(stride), padding_(padding) {
  const int fan_in = in_ch * kernel;
  weight_ = RegisterParameter("weight", {out_ch, in_ch, kernel},
                              KaimingUniform(static_cast<std::size_t>(out_ch) * fan_in, fan_in, rng));
  bias_ = RegisterParameter("bias", {out_ch}, std::vector<double>(out_ch, 0.0));
}

Tensor Conv1dLayer::Forward(const Tensor& x) const { return Conv1d(x, weight_, bias_, stride_, padding_); }

Conv2dLayer::Conv2dLayer(int in_ch, int out_ch, int kernel, Rng& rng) : pad_(kernel / 2) {
  const int fan_in = in_ch * kernel * kernel;
  weight_ = RegisterParameter("weight", {out_ch, in_ch, kernel, kernel},
                              KaimingUniform(static_cast<std::size_t>(out_ch) * fan_in, fan_in, rng));
  bias_ = RegisterParameter("bias", {out_ch}, std::vector<double>(out_ch, 0.0));
}

Tensor Conv2dLayer::Forward(const Tensor& x) const { return Conv2d(x, weight_, bias_, pad_, pad_); }

BatchNormLayer::BatchNormLayer(int channels) {
  gamma_ = RegisterParameter("weight", {channels}, std::vector<double>(channels, 1.0));
  beta_ = RegisterParameter("bias", {channels}, std::vector<double>(channels, 0.0));
  running_mean_ = RegisterBuffer("running_mean", {channels}, std::vector<double>(channels, 0.0));
  running_var_ = RegisterBuffer("running_var", {channels}, std::vector<double>(channels, 1.0));
}

Tensor BatchNormLayer::Forward(const Tensor& x) const {
  return BatchNorm(x, gamma_, beta_, running_mean_, running_var_, training());
}

FmsLayer::FmsLayer(int channels, Rng& rng) { fc_ = RegisterModule("fc", std::make_shared<LinearLayer>(channels, channels, rng)); }

Tensor FmsLayer::Forward(const Tensor& x) const {
  return ChannelScaleAdd(x, Sigmoid(fc_->Forward(GlobalAvgPool(x))));
}

}  // namespace cadd::nn
