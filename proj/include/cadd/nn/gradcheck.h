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

#ifndef CADD_NN_GRADCHECK_H_
#define CADD_NN_GRADCHECK_H_

#include <cstdint>
#include <string>
#include <vector>

#include "cadd/nn/cadd_model.h"

namespace cadd::nn {

struct GradCheckOptions {
  double step = 1e-5;
  // Coordinates compared per parameter tensor; 0 checks every coordinate.
  int max_coords_per_tensor = 0;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  std::size_t coords_checked = 0;
  std::size_t tensors_checked = 0;
  // Difference windows shrunk because the one-sided slopes disagreed.
  std::size_t kink_refinements = 0;
};

// |a - n| / max(|a|, |n|, 1e-5)
double RelativeError(double analytic, double numeric);

// Compares backprop gradients of mean BCE(model(audio, context), labels)
// against central differences for every trainable parameter tensor.
GradCheckResult CheckGradients(CaddModel& model, const Tensor& audio, const Tensor& context,
                               const std::vector<double>& labels, const GradCheckOptions& options = {});

}  // namespace cadd::nn

#endif  // CADD_NN_GRADCHECK_H_
