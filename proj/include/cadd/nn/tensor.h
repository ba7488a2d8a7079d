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

#ifndef CADD_NN_TENSOR_H_
#define CADD_NN_TENSOR_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace cadd::nn {

using Shape = std::vector<int>;

std::size_t NumElements(const Shape& shape);
std::string ShapeString(const Shape& shape);

struct Node;
using Tensor = std::shared_ptr<Node>;

// One value in the reverse-mode tape. Row-major storage; the leading
// dimension is the batch for activations.
struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until something flows back
  bool requires_grad = false;
  std::vector<Tensor> parents;
  std::function<void()> backward;

  std::size_t numel() const { return value.size(); }
  int dim(int i) const { return shape.at(i); }
  // Grad buffer, zero-initialised on first use.
  double* mutable_grad();
  void ZeroGrad();
};

Tensor MakeTensor(Shape shape, std::vector<double> value, bool requires_grad = false);
Tensor Zeros(Shape shape, bool requires_grad = false);

// Graph recording is on by default; a guard disables it for the current
// thread (evaluation, finite differences).
bool GradEnabled();
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Runs backpropagation from a single-element tensor.
void Backward(const Tensor& loss);

}  // namespace cadd::nn

#endif  // CADD_NN_TENSOR_H_
