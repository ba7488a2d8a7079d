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

#ifndef CADD_PERTURB_NOISE_ASSETS_H_
#define CADD_PERTURB_NOISE_ASSETS_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "cadd/audio/wav.h"

namespace cadd::perturb {

// Procedural stand-ins for the background-noise recordings; each kind has
// a recognisable temporal/spectral texture (steady hiss, gusts, periodic
// clicks, thumps, bursts).
audio::Waveform SynthesizeNoise(const std::string& kind, double seconds = 2.0, std::uint64_t seed = 0);

// Writes <dir>/<kind>.wav for every kind.
void WriteNoiseAssets(const std::filesystem::path& dir, double seconds = 2.0, std::uint64_t seed = 0);

}  // namespace cadd::perturb

#endif  // CADD_PERTURB_NOISE_ASSETS_H_
