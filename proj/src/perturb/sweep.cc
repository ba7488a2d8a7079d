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

#include "cadd/perturb/sweep.h"

#include <atomic>
#include <mutex>
#include <string>

#include "cadd/common/error.h"
#include "cadd/common/hash.h"
#include "cadd/common/io.h"

namespace cadd::perturb {

namespace fs = std::filesystem;

namespace {

void ApplyOne(const data::AudioSample& s, const Perturbation& p, const Environment& env, const fs::path& path) {
  Perturbation local = p;
  local.seed = Mix64(p.seed ^ Fnv1a64(s.id));
  audio::WriteWav(path, Apply(local, audio::ReadWav(s.audio_path), env));
}

}  // namespace

std::vector<SweepEntry> RunSweep(const data::DatasetManifest& manifest, const std::vector<Perturbation>& grid,
                                 const Environment& env, const fs::path& out_dir, bool parallel) {
  if (grid.empty()) throw ValidationError("perturbation sweep: empty grid");
  std::vector<fs::path> dirs;
  for (const auto& p : grid) {
    dirs.push_back(out_dir / p.Name());
    fs::create_directories(dirs.back());
  }
  const auto& samples = manifest.samples();
  const long jobs = static_cast<long>(grid.size() * samples.size());

  // Errors inside the parallel region are carried out and rethrown with
  // their original category.
  std::mutex mu;
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  auto run = [&](long j) {
    if (failed.load()) return;
    const auto pi = static_cast<std::size_t>(j) / samples.size();
    const auto si = static_cast<std::size_t>(j) % samples.size();
    try {
      ApplyOne(samples[si], grid[pi], env, dirs[pi] / (samples[si].id + ".wav"));
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!first_error) first_error = std::current_exception();
      failed = true;
    }
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long j = 0; j < jobs; ++j) run(j);
  } else {
    for (long j = 0; j < jobs; ++j) run(j);
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<SweepEntry> entries;
  nlohmann::json listing = nlohmann::json::array();
  for (std::size_t pi = 0; pi < grid.size(); ++pi) {
    data::DatasetManifest out(manifest.name() + "/" + grid[pi].Name(), {});
    for (const auto& s : samples) {
      data::AudioSample copy = s;
      copy.audio_path = fs::absolute(dirs[pi] / (s.id + ".wav"));
      copy.sample_rate = audio::kSampleRate;
      out.Add(std::move(copy));
    }
    SweepEntry e{grid[pi], dirs[pi] / "manifest.jsonl"};
    data::SaveManifest(out, e.manifest);
    listing.push_back({{"name", grid[pi].Name()},
                       {"family", FamilyName(grid[pi].family)},
                       {"value", grid[pi].value},
                       {"kind", grid[pi].kind},
                       {"seed", grid[pi].seed},
                       {"manifest", fs::absolute(e.manifest).string()}});
    entries.push_back(std::move(e));
  }
  WriteJsonFile(out_dir / "sweep.json", {{"samples", samples.size()},
                                         {"mp3_codec", env.mp3 ? env.mp3->name() : ""},
                                         {"perturbations", listing}});
  return entries;
}

std::vector<SweepEntry> LoadSweep(const fs::path& out_dir) {
  const auto j = ReadJsonFile(out_dir / "sweep.json");
  std::vector<SweepEntry> entries;
  for (const auto& p : j.at("perturbations")) {
    Perturbation pert = Perturbation::Parse(p.at("name").get<std::string>(), p.value("seed", std::uint64_t{0}));
    entries.push_back({pert, p.at("manifest").get<std::string>()});
  }
  return entries;
}

}  // namespace cadd::perturb
