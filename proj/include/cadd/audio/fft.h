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

#ifndef CADD_AUDIO_FFT_H_
#define CADD_AUDIO_FFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cadd::audio {

// Real-input FFT of fixed size n backed by FFTW. Plans are created under a
// process-wide lock; execution is thread-safe on distinct buffers.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }

  // input.size() == n, returns n/2+1 bins.
  std::vector<std::complex<double>> Forward(std::span<const double> input) const;
  // Unnormalized inverse: Inverse(Forward(x)) == n * x.
  std::vector<double> Inverse(std::span<const std::complex<double>> spectrum) const;

 private:
  std::size_t n_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace cadd::audio

#endif  // CADD_AUDIO_FFT_H_
