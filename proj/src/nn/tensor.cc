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

#include "cadd/nn/tensor.h"

#include <algorithm>
#include <unordered_set>

#include "cadd/common/error.h"

namespace cadd::nn {

namespace {
thread_local bool g_grad_enabled = true;
}  // namespace

std::size_t NumElements(const Shape& shape) {
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

std::string ShapeString(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? ", " : "") + std::to_string(shape[i]);
  return s + "]";
}

double* Node::mutable_grad() {
  if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
  return grad.data();
}

void Node::ZeroGrad() { std::fill(grad.begin(), grad.end(), 0.0); }

Tensor MakeTensor(Shape shape, std::vector<double> value, bool requires_grad) {
  if (NumElements(shape) != value.size()) {
    throw ValidationError("tensor shape " + ShapeString(shape) + " does not match " + std::to_string(value.size()) +
                          " values");
  }
  auto t = std::make_shared<Node>();
  t->shape = std::move(shape);
  t->value = std::move(value);
  t->requires_grad = requires_grad;
  return t;
}

Tensor Zeros(Shape shape, bool requires_grad) {
  const std::size_t n = NumElements(shape);
  return MakeTensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

bool GradEnabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

void Backward(const Tensor& loss) {
  if (loss->numel() != 1) throw ValidationError("backward needs a single-element loss");
  if (!loss->requires_grad) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{loss.get(), 0}};
  seen.insert(loss.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  loss->mutable_grad()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward) (*it)->backward();
  }
}

}  // namespace cadd::nn
