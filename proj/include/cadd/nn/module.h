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

#ifndef CADD_NN_MODULE_H_
#define CADD_NN_MODULE_H_

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cadd/common/random.h"
#include "cadd/nn/tensor.h"

namespace cadd::nn {

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

// Owns parameters, buffers and child modules under stable dotted names.
class Module {
 public:
  virtual ~Module() = default;

  NamedTensors NamedParameters() const;
  NamedTensors NamedBuffers() const;
  // Parameters followed by buffers; this is what a checkpoint stores.
  NamedTensors StateDict() const;
  std::size_t ParameterCount() const;

  void SetTraining(bool training);
  bool training() const { return training_; }
  void ZeroGrad();
  // Stops gradient flow into every parameter of this subtree.
  void Freeze();

 protected:
  Tensor RegisterParameter(const std::string& name, Shape shape, std::vector<double> values);
  Tensor RegisterBuffer(const std::string& name, Shape shape, std::vector<double> values);
  template <typename M>
  std::shared_ptr<M> RegisterModule(const std::string& name, std::shared_ptr<M> module) {
    children_.emplace_back(name, module);
    return module;
  }

 private:
  void Collect(const std::string& prefix, bool buffers, NamedTensors* out) const;

  bool training_ = true;
  NamedTensors parameters_;
  NamedTensors buffers_;
  std::vector<std::pair<std::string, std::shared_ptr<Module>>> children_;
};

// Kaiming-uniform fan-in initialisation (bound sqrt(6 / fan_in)).
std::vector<double> KaimingUniform(std::size_t count, int fan_in, Rng& rng);

class LinearLayer : public Module {
 public:
  LinearLayer(int in, int out, Rng& rng);
  Tensor Forward(const Tensor& x) const;
  int in() const { return in_; }
  int out() const { return out_; }
  const Tensor& weight() const { return weight_; }
  const Tensor& bias() const { return bias_; }

 private:
  int in_;
  int out_;
  Tensor weight_;
  Tensor bias_;
};

class Conv1dLayer : public Module {
 public:
  Conv1dLayer(int in_ch, int out_ch, int kernel, int stride, int padding, Rng& rng);
  Tensor Forward(const Tensor& x) const;

 private:
  int stride_;
  int padding_;
  Tensor weight_;
  Tensor bias_;
};

class Conv2dLayer : public Module {
 public:
  // Square kernel, unit stride, "same" padding for odd kernels.
  Conv2dLayer(int in_ch, int out_ch, int kernel, Rng& rng);
  Tensor Forward(const Tensor& x) const;

 private:
  int pad_;
  Tensor weight_;
  Tensor bias_;
};

class BatchNormLayer : public Module {
 public:
  explicit BatchNormLayer(int channels);
  Tensor Forward(const Tensor& x) const;

 private:
  Tensor gamma_;
  Tensor beta_;
  Tensor running_mean_;
  Tensor running_var_;
};

// Feature map scaling: sigmoid(linear(mean over time)) as scale and shift.
class FmsLayer : public Module {
 public:
  FmsLayer(int channels, Rng& rng);
  Tensor Forward(const Tensor& x) const;

 private:
  std::shared_ptr<LinearLayer> fc_;
};

}  // namespace cadd::nn

#endif  // CADD_NN_MODULE_H_
