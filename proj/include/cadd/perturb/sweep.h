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

#ifndef CADD_PERTURB_SWEEP_H_
#define CADD_PERTURB_SWEEP_H_

#include <filesystem>
#include <vector>

#include "cadd/data/dataset.h"
#include "cadd/perturb/perturb.h"

namespace cadd::perturb {

struct SweepEntry {
  Perturbation perturbation;
  std::filesystem::path manifest;  // <out>/<name>/manifest.jsonl
};

// Writes <out>/<name>/<id>.wav for every (sample, perturbation), one
// manifest per perturbation (same ids and labels, new audio paths) and
// <out>/sweep.json. Per-sample seeds derive from the perturbation seed and
// the sample id, so the result does not depend on scheduling.
std::vector<SweepEntry> RunSweep(const data::DatasetManifest& manifest, const std::vector<Perturbation>& grid,
                                 const Environment& env, const std::filesystem::path& out_dir, bool parallel = true);

std::vector<SweepEntry> LoadSweep(const std::filesystem::path& out_dir);

}  // namespace cadd::perturb

#endif  // CADD_PERTURB_SWEEP_H_
