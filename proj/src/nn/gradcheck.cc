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

#include "cadd/nn/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cadd/common/random.h"
#include "cadd/nn/ops.h"

namespace cadd::nn {

namespace {
constexpr int kMaxRefinements = 2;
constexpr double kKinkThreshold = 1e-4;
}  // namespace

double RelativeError(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-5});
  return std::abs(analytic - numeric) / denom;
}

GradCheckResult CheckGradients(CaddModel& model, const Tensor& audio, const Tensor& context,
                               const std::vector<double>& labels, const GradCheckOptions& options) {
  model.SetTraining(true);
  model.ZeroGrad();
  Backward(BceLoss(model.Forward(audio, context), labels));

  auto loss_at = [&] {
    NoGradGuard guard;
    return BceLoss(model.Forward(audio, context), labels)->value[0];
  };
  const double base = loss_at();

  GradCheckResult result;
  Rng rng(options.seed);
  for (const auto& [name, t] : model.NamedParameters()) {
    if (!t->requires_grad) continue;
    std::vector<std::size_t> coords(t->numel());
    std::iota(coords.begin(), coords.end(), 0);
    if (options.max_coords_per_tensor > 0 && coords.size() > static_cast<std::size_t>(options.max_coords_per_tensor)) {
      rng.Shuffle(std::span<std::size_t>(coords));
      coords.resize(options.max_coords_per_tensor);
    }
    const std::vector<double> analytic = t->grad.empty() ? std::vector<double>(t->numel(), 0.0) : t->grad;
    for (std::size_t k : coords) {
      const double saved = t->value[k];
      double step = options.step;
      double numeric = 0.0;
      for (int attempt = 0; attempt <= kMaxRefinements; ++attempt) {
        t->value[k] = saved + step;
        const double up = loss_at();
        t->value[k] = saved - step;
        const double down = loss_at();
        t->value[k] = saved;
        numeric = (up - down) / (2.0 * step);
        // A ReLU/max switch or a log singularity near [x-h, x+h] shows up as
        // one-sided slopes that disagree; shrink the window.
        if (RelativeError((up - base) / step, (base - down) / step) < kKinkThreshold) break;
        if (attempt < kMaxRefinements) {
          step /= 10.0;
          ++result.kink_refinements;
        }
      }
      const double err = RelativeError(analytic[k], numeric);
      if (err > result.max_rel_error) {
        result.max_rel_error = err;
        result.worst_parameter = name;
        result.worst_index = k;
      }
      ++result.coords_checked;
    }
    ++result.tensors_checked;
  }
  return result;
}

}  // namespace cadd::nn
