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

#include "cadd/train/toy.h"

#include <array>
#include <string>
#include <vector>

#include "cadd/audio/wav.h"
#include "cadd/common/hash.h"
#include "cadd/common/io.h"
#include "cadd/common/random.h"
#include "cadd/context/providers.h"
#include "cadd/context/types.h"
#include "cadd/data/dataset.h"

namespace cadd::train {

namespace fs = std::filesystem;

namespace {

constexpr std::array<const char*, 12> kRealWords = {"senate", "budget",  "hearing",  "committee",
                                                     "harvest", "stadium", "orchestra", "museum",
                                                     "bridge",  "election", "festival", "laboratory"};
constexpr std::array<const char*, 12> kFakeWords = {"giveaway", "crypto",  "miracle", "secret",
                                                    "shocking", "leaked",  "scandal", "exclusive",
                                                    "urgent",   "bitcoin", "banned",  "exposed"};

std::string Sentence(Rng& rng, bool fake, bool signal, int words) {
  std::string out;
  for (int w = 0; w < words; ++w) {
    const bool use_fake = signal ? fake : rng.Index(2) == 1;
    const auto& pool = use_fake ? kFakeWords : kRealWords;
    if (!out.empty()) out += ' ';
    out += pool[rng.Index(pool.size())];
  }
  return out;
}

}  // namespace

ToyDataset WriteToyDataset(const fs::path& dir, const ToyDatasetOptions& options) {
  ToyDataset toy{dir / "manifest.jsonl", dir / "context"};
  fs::create_directories(dir / "audio");
  fs::create_directories(toy.context_fixtures);
  const Date published(2024, 3, 15);
  const auto n_samples = static_cast<std::size_t>(options.duration_s * audio::kSampleRate);

  data::DatasetManifest manifest("toy", {});
  for (std::size_t i = 0; i < options.n; ++i) {
    const bool fake = i >= options.n / 2;
    Rng rng(Mix64(options.seed ^ (0x70790000ULL + i)));

    audio::Waveform wave;
    wave.samples.resize(n_samples);
    for (auto& s : wave.samples) s = 0.1 * rng.Normal();
    const std::string id = "toy" + std::to_string(i);
    const fs::path wav = dir / "audio" / (id + ".wav");
    audio::WriteWav(wav, wave);

    data::AudioSample s;
    s.id = id;
    s.audio_path = fs::absolute(wav);
    s.label = fake ? data::Label::kFake : data::Label::kReal;
    s.subject = "Toy Subject " + std::to_string(i);
    s.publish_date = published;
    s.transcript = Sentence(rng, fake, options.text_signal, 12);
    s.source_tag = "toy";
    manifest.Add(s);

    context::ContextBundle bundle;
    context::SubjectProfile profile;
    profile.description = Sentence(rng, fake, options.text_signal, 6);
    profile.occupations = {"politician"};
    profile.category = context::CategorizeOccupation(profile.occupations);
    bundle.profile = profile;
    for (int k = 0; k < 3; ++k) {
      bundle.news.push_back({Sentence(rng, fake, options.text_signal, 5), Sentence(rng, fake, options.text_signal, 20),
                             Date(2024, 3, static_cast<unsigned>(1 + k))});
    }
    for (int k = 0; k < 2; ++k) {
      bundle.posts.push_back({Sentence(rng, fake, options.text_signal, 5), Sentence(rng, fake, options.text_signal, 10),
                              {Sentence(rng, fake, options.text_signal, 4)}, Date(2024, 3, static_cast<unsigned>(5 + k))});
    }
    WriteJsonFile(toy.context_fixtures / (context::FixtureContextStub::Slug(s.subject) + ".json"), context::ToJson(bundle));
  }
  data::SaveManifest(manifest, toy.manifest);
  return toy;
}

}  // namespace cadd::train
