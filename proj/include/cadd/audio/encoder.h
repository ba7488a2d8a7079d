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

#ifndef CADD_AUDIO_ENCODER_H_
#define CADD_AUDIO_ENCODER_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cadd/audio/wav.h"

namespace cadd::audio {

// Frozen speech encoder producing one embedding row per frame. Encoders
// sit outside the trainable graph: nothing downstream can update them.
class SpeechEncoderProvider {
 public:
  virtual ~SpeechEncoderProvider() = default;
  virtual Eigen::MatrixXd Encode(const Waveform& wave) const = 0;
  virtual int width() const = 0;
  virtual std::string name() const = 0;
  // Digest of the encoder's weights; stays constant for the encoder's lifetime.
  virtual std::uint64_t ParameterHash() const = 0;
  bool frozen() const { return true; }
};

// Seeded random projection of 25 ms / 10 ms frames followed by tanh.
class RandomProjectionEncoder : public SpeechEncoderProvider {
 public:
  explicit RandomProjectionEncoder(std::uint64_t seed = 0, int width = 32);

  Eigen::MatrixXd Encode(const Waveform& wave) const override;
  int width() const override { return width_; }
  std::string name() const override { return "random-projection"; }
  std::uint64_t ParameterHash() const override;

 private:
  int width_;
  int frame_ = 400;
  int hop_ = 160;
  Eigen::MatrixXd projection_;  // width x frame
};

// Invokes `command <in.wav> <out.csv>`; the tool writes one comma-separated
// embedding row per frame.
class ExternalCommandEncoder : public SpeechEncoderProvider {
 public:
  ExternalCommandEncoder(std::string command, int width);

  Eigen::MatrixXd Encode(const Waveform& wave) const override;
  int width() const override { return width_; }
  std::string name() const override { return "external:" + command_; }
  std::uint64_t ParameterHash() const override;

 private:
  std::string command_;
  int width_;
};

}  // namespace cadd::audio

#endif  // CADD_AUDIO_ENCODER_H_
