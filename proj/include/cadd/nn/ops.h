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

#ifndef CADD_NN_OPS_H_
#define CADD_NN_OPS_H_

#include <vector>

#include "cadd/nn/tensor.h"

namespace cadd::nn {

// x [B, in], w [out, in], b [out] or null.
Tensor Linear(const Tensor& x, const Tensor& w, const Tensor& b);
// x [B, C, L], w [O, C, K].
Tensor Conv1d(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int padding);
// x [B, C, H, W], w [O, C, KH, KW]; unit stride.
Tensor Conv2d(const Tensor& x, const Tensor& w, const Tensor& b, int pad_h, int pad_w);

Tensor LeakyRelu(const Tensor& x, double slope);
Tensor Relu(const Tensor& x);
Tensor Sigmoid(const Tensor& x);
Tensor Abs(const Tensor& x);
// log(x + eps)
Tensor Log(const Tensor& x, double eps);
Tensor Add(const Tensor& a, const Tensor& b);

// Feature-map scaling: x [B, C, L], s [B, C] gives x * s + s per channel.
Tensor ChannelScaleAdd(const Tensor& x, const Tensor& s);

// Concatenates two [B, *] matrices along the feature axis.
Tensor Concat(const Tensor& a, const Tensor& b);
Tensor Flatten(const Tensor& x);

// Non-overlapping max pooling; a trailing partial window is dropped.
Tensor MaxPool1d(const Tensor& x, int kernel);
Tensor MaxPool2d(const Tensor& x, int kh, int kw);

// Max-feature-map: splits the channel axis in two halves and keeps the
// elementwise maximum. Works on [B, C, ...] and [B, C].
Tensor Mfm(const Tensor& x);

// Mean over every axis after the channel axis: [B, C, ...] -> [B, C].
Tensor GlobalAvgPool(const Tensor& x);
// [B, C, H, W] -> [B, C, oh, ow] with torch-style bin edges.
Tensor AdaptiveAvgPool2d(const Tensor& x, int oh, int ow);
// [B, C, L] -> [B, 2C]: per-channel mean then standard deviation.
Tensor StatsPool(const Tensor& x);
// Subtracts the per-channel time mean of [B, C, L].
Tensor MeanNormalize(const Tensor& x);

// Batch normalization over every axis except the channel axis (1).
// In training mode batch statistics are used and the running buffers
// are updated; otherwise the running buffers normalize.
Tensor BatchNorm(const Tensor& x, const Tensor& gamma, const Tensor& beta, const Tensor& running_mean,
                 const Tensor& running_var, bool training, double momentum = 0.1, double eps = 1e-5);

inline constexpr double kProbClamp = 1e-7;

// Mean binary cross-entropy of probabilities p [B, 1] against labels.
Tensor BceLoss(const Tensor& p, const std::vector<double>& labels);
double Bce(double y, double p);

}  // namespace cadd::nn

#endif  // CADD_NN_OPS_H_
