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

// Writes a small labelled dataset whose transcripts and context carry the
// label, plus ready-to-run experiment configs for the cadd tool.
// Usage: make_toy_dataset <dir> [--n N] [--seed S] [--epochs E]
#include <iostream>

#include <CLI11.hpp>

#include "cadd/common/io.h"
#include "cadd/train/toy.h"

int main(int argc, char** argv) {
  CLI::App app{"Generate the toy dataset"};
  std::string dir;
  cadd::train::ToyDatasetOptions opts;
  int epochs = 30;
  app.add_option("dir", dir)->required();
  app.add_option("--n", opts.n, "Number of samples (half real)")->capture_default_str();
  app.add_option("--seed", opts.seed);
  app.add_option("--duration", opts.duration_s, "Clip length in seconds")->capture_default_str();
  app.add_option("--epochs", epochs, "Epochs written into the configs")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  try {
    const auto toy = cadd::train::WriteToyDataset(dir, opts);
    for (const std::string variant : {"BASELINE", "T+C"}) {
      const nlohmann::json cfg{
          {"name", variant == "BASELINE" ? "lcnn_baseline" : "lcnn_tc"},
          {"manifest", toy.manifest.filename().string()},
          {"backbone", "lcnn"},
          {"channels", 4},
          {"input_frames", 32},
          {"variant", variant},
          {"feature_set", "lfcc"},
          {"epochs", epochs},
          {"seeds", {0, 1, 2}},
          {"split_seed", opts.seed},
          {"providers", {{"context_mode", "stub"}, {"context_fixtures", toy.context_fixtures.filename().string()}}},
          {"out_dir", variant == "BASELINE" ? "runs/baseline" : "runs/tc"}};
      const auto path = std::filesystem::path(dir) / (variant == "BASELINE" ? "baseline.json" : "tc.json");
      cadd::WriteJsonFile(path, cfg);
      std::cout << path.string() << "\n";
    }
    std::cout << toy.manifest.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
