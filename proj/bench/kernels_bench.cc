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


// Serial reference vs OpenMP kernels at the layer sizes the models use.
// The second argument selects the backend: 0 serial, 1 OpenMP.

#include <vector>

#include <benchmark/benchmark.h>

#include "cadd/common/random.h"
#include "cadd/kernels/kernels.h"

namespace {

using cadd::kernels::Backend;

std::vector<double> Random(std::size_t n, std::uint64_t seed) {
  cadd::Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.Uniform(-1.0, 1.0);
  return v;
}

Backend BackendArg(const benchmark::State& state) { return state.range(1) == 0 ? Backend::kSerial : Backend::kOpenMP; }

// Fusion layer: batch 16, in = feat + ctx, out = feat.
void BM_LinearForward(benchmark::State& state) {
  const int feat = static_cast<int>(state.range(0));
  const cadd::kernels::LinearDims d{16, feat + feat / 6, feat};
  const auto x = Random(static_cast<std::size_t>(d.batch) * d.in, 1);
  const auto w = Random(static_cast<std::size_t>(d.out) * d.in, 2);
  const auto b = Random(d.out, 3);
  std::vector<double> y(static_cast<std::size_t>(d.batch) * d.out);
  for (auto _ : state) {
    cadd::kernels::LinearForward(BackendArg(state), d, x.data(), w.data(), b.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * d.batch * d.in * d.out);
}

void BM_LinearBackward(benchmark::State& state) {
  const int feat = static_cast<int>(state.range(0));
  const cadd::kernels::LinearDims d{16, feat + feat / 6, feat};
  const auto x = Random(static_cast<std::size_t>(d.batch) * d.in, 1);
  const auto w = Random(static_cast<std::size_t>(d.out) * d.in, 2);
  const auto dy = Random(static_cast<std::size_t>(d.batch) * d.out, 3);
  std::vector<double> dx(x.size()), dw(w.size()), db(d.out);
  for (auto _ : state) {
    cadd::kernels::LinearBackward(BackendArg(state), d, x.data(), w.data(), dy.data(), dx.data(), dw.data(),
                                  db.data());
    benchmark::DoNotOptimize(dw.data());
  }
  state.SetItemsProcessed(state.iterations() * 2 * d.batch * d.in * d.out);
}

// RawNet3-style first convolution over one second of audio.
void BM_Conv1dForward(benchmark::State& state) {
  const cadd::kernels::Conv1dDims d{8, 1, static_cast<int>(state.range(0)), 16000, 3, 3, 0};
  const auto x = Random(static_cast<std::size_t>(d.batch) * d.in_ch * d.length, 1);
  const auto w = Random(static_cast<std::size_t>(d.out_ch) * d.in_ch * d.kernel, 2);
  const auto b = Random(d.out_ch, 3);
  std::vector<double> y(static_cast<std::size_t>(d.batch) * d.out_ch * d.OutLength());
  for (auto _ : state) {
    cadd::kernels::Conv1dForward(BackendArg(state), d, x.data(), w.data(), b.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
}

// LCNN-style 3x3 convolution over a 98 x 20 cepstral map.
void BM_Conv2dForward(benchmark::State& state) {
  const int ch = static_cast<int>(state.range(0));
  const cadd::kernels::Conv2dDims d{16, ch, ch, 98, 20, 3, 3, 1, 1, 1, 1};
  const auto x = Random(static_cast<std::size_t>(d.batch) * d.in_ch * d.height * d.width, 1);
  const auto w = Random(static_cast<std::size_t>(d.out_ch) * d.in_ch * d.kh * d.kw, 2);
  const auto b = Random(d.out_ch, 3);
  std::vector<double> y(static_cast<std::size_t>(d.batch) * d.out_ch * d.OutHeight() * d.OutWidth());
  for (auto _ : state) {
    cadd::kernels::Conv2dForward(BackendArg(state), d, x.data(), w.data(), b.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_Conv2dBackward(benchmark::State& state) {
  const int ch = static_cast<int>(state.range(0));
  const cadd::kernels::Conv2dDims d{16, ch, ch, 98, 20, 3, 3, 1, 1, 1, 1};
  const auto x = Random(static_cast<std::size_t>(d.batch) * d.in_ch * d.height * d.width, 1);
  const auto w = Random(static_cast<std::size_t>(d.out_ch) * d.in_ch * d.kh * d.kw, 2);
  const auto dy = Random(static_cast<std::size_t>(d.batch) * d.out_ch * d.OutHeight() * d.OutWidth(), 3);
  std::vector<double> dx(x.size()), dw(w.size()), db(d.out_ch);
  for (auto _ : state) {
    cadd::kernels::Conv2dBackward(BackendArg(state), d, x.data(), w.data(), dy.data(), dx.data(), dw.data(),
                                  db.data());
    benchmark::DoNotOptimize(dw.data());
  }
}

BENCHMARK(BM_LinearForward)->ArgsProduct({{128, 768, 3072}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LinearBackward)->ArgsProduct({{128, 768}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Conv1dForward)->ArgsProduct({{8, 32}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Conv2dForward)->ArgsProduct({{4, 16}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Conv2dBackward)->ArgsProduct({{4, 16}, {0, 1}})->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
