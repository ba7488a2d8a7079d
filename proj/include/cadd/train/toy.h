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

#ifndef CADD_TRAIN_TOY_H_
#define CADD_TRAIN_TOY_H_

#include <cstdint>
#include <filesystem>

namespace cadd::train {

// Small on-disk dataset for smoke runs: white-noise audio that carries no
// label information, and transcripts/context whose vocabulary does.
struct ToyDatasetOptions {
  std::size_t n = 60;  // half real, half fake
  std::uint64_t seed = 0;
  double duration_s = 0.5;
  bool text_signal = true;  // false: both classes draw from one vocabulary
};

struct ToyDataset {
  std::filesystem::path manifest;
  std::filesystem::path context_fixtures;
};

ToyDataset WriteToyDataset(const std::filesystem::path& dir, const ToyDatasetOptions& options = {});

}  // namespace cadd::train

#endif  // CADD_TRAIN_TOY_H_
