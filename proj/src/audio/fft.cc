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

#include "cadd/audio/fft.h"

#include <fftw3.h>

#include <mutex>

#include "cadd/common/error.h"

namespace cadd::audio {

namespace {

std::mutex& PlannerMutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {}
  ~FftwBuffer() { fftw_free(ptr); }
  void* ptr;
};

}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n < 2) throw ValidationError("FFT size must be at least 2");
  FftwBuffer real(sizeof(double) * n);
  FftwBuffer cplx(sizeof(fftw_complex) * bins());
  std::lock_guard<std::mutex> lock(PlannerMutex());
  forward_plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), static_cast<double*>(real.ptr),
                                       static_cast<fftw_complex*>(cplx.ptr), FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), static_cast<fftw_complex*>(cplx.ptr),
                                       static_cast<double*>(real.ptr), FFTW_ESTIMATE);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr) {
    throw EnvironmentError("FFTW failed to create a plan");
  }
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

std::vector<std::complex<double>> RealFft::Forward(std::span<const double> input) const {
  if (input.size() != n_) throw ValidationError("FFT input size mismatch");
  FftwBuffer real(sizeof(double) * n_);
  FftwBuffer cplx(sizeof(fftw_complex) * bins());
  std::copy(input.begin(), input.end(), static_cast<double*>(real.ptr));
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), static_cast<double*>(real.ptr),
                       static_cast<fftw_complex*>(cplx.ptr));
  const auto* c = static_cast<const fftw_complex*>(cplx.ptr);
  std::vector<std::complex<double>> out(bins());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = {c[k][0], c[k][1]};
  return out;
}

std::vector<double> RealFft::Inverse(std::span<const std::complex<double>> spectrum) const {
  if (spectrum.size() != bins()) throw ValidationError("inverse FFT input size mismatch");
  FftwBuffer real(sizeof(double) * n_);
  FftwBuffer cplx(sizeof(fftw_complex) * bins());
  auto* c = static_cast<fftw_complex*>(cplx.ptr);
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    c[k][0] = spectrum[k].real();
    c[k][1] = spectrum[k].imag();
  }
  // c2r destroys its input, which is our private copy.
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), c, static_cast<double*>(real.ptr));
  const auto* r = static_cast<const double*>(real.ptr);
  return std::vector<double>(r, r + n_);
}

}  // namespace cadd::audio
