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

#include "cadd/audio/encoder.h"

#include <cmath>
#include <sstream>

#include "cadd/audio/cepstral.h"
#include "cadd/common/error.h"
#include "cadd/common/hash.h"
#include "cadd/common/io.h"
#include "cadd/common/process.h"
#include "cadd/common/random.h"

namespace cadd::audio {

RandomProjectionEncoder::RandomProjectionEncoder(std::uint64_t seed, int width)
    : width_(width), projection_(width, 400) {
  if (width < 1) throw ValidationError("encoder width must be positive");
  Rng rng(Mix64(seed ^ 0x5eedc0deULL));
  const double scale = 1.0 / std::sqrt(static_cast<double>(frame_));
  for (int r = 0; r < width_; ++r) {
    for (int c = 0; c < frame_; ++c) projection_(r, c) = rng.Normal() * scale;
  }
}

Eigen::MatrixXd RandomProjectionEncoder::Encode(const Waveform& wave) const {
  const std::size_t n_frames = FrameCount(wave.size(), frame_, hop_);
  if (n_frames == 0) throw ValidationError("audio shorter than one encoder frame");
  Eigen::MatrixXd frames(frame_, static_cast<Eigen::Index>(n_frames));
  for (std::size_t t = 0; t < n_frames; ++t) {
    for (int i = 0; i < frame_; ++i) frames(i, static_cast<Eigen::Index>(t)) = wave.samples[t * hop_ + i];
  }
  Eigen::MatrixXd out = (projection_ * frames).transpose();
  return out.unaryExpr([](double v) { return std::tanh(v); });
}

std::uint64_t RandomProjectionEncoder::ParameterHash() const {
  return Fnv1a64(std::span<const double>(projection_.data(), projection_.size()));
}

ExternalCommandEncoder::ExternalCommandEncoder(std::string command, int width)
    : command_(std::move(command)), width_(width) {
  if (!FindExecutable(command_)) throw EnvironmentError("speech encoder command not found: " + command_);
}

Eigen::MatrixXd ExternalCommandEncoder::Encode(const Waveform& wave) const {
  ScratchDir scratch;
  const auto in = scratch.path() / "in.wav";
  const auto out = scratch.path() / "out.csv";
  WriteWav(in, wave);
  if (RunProcess({command_, in.string(), out.string()}) != 0) {
    throw EnvironmentError("speech encoder command failed: " + command_);
  }
  std::stringstream text(ReadTextFile(out));
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(text, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) != width_) throw ParseError("encoder output width mismatch");
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), width_);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < width_; ++c) m(static_cast<Eigen::Index>(r), c) = rows[r][c];
  }
  return m;
}

std::uint64_t ExternalCommandEncoder::ParameterHash() const { return Fnv1a64(command_); }

}  // namespace cadd::audio
