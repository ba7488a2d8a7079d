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

// Writes the procedural background-noise bank used by the background_noise
// perturbations. Usage: make_noise_assets <dir> [--seconds S] [--seed N]
#include <iostream>

#include <CLI11.hpp>

#include "cadd/common/error.h"
#include "cadd/perturb/noise_assets.h"
#include "cadd/perturb/perturb.h"

int main(int argc, char** argv) {
  CLI::App app{"Generate background-noise assets"};
  std::string dir;
  double seconds = 2.0;
  std::uint64_t seed = 0;
  app.add_option("dir", dir, "Output directory")->required();
  app.add_option("--seconds", seconds, "Clip length in seconds")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Synthesis seed");
  CLI11_PARSE(app, argc, argv);
  try {
    cadd::perturb::WriteNoiseAssets(dir, seconds, seed);
    for (const auto& kind : cadd::perturb::NoiseKinds()) std::cout << dir << "/" << kind << ".wav\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
