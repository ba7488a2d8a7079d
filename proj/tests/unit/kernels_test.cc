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

#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "cadd/common/random.h"
#include "cadd/kernels/kernels.h"

namespace cadd::kernels {
namespace {

std::vector<double> RandomVector(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.Uniform(-1.0, 1.0);
  return v;
}

double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

Conv1dDims RandomConv1d(Rng& rng) {
  Conv1dDims d;
  d.batch = 1 + static_cast<int>(rng.Index(3));
  d.in_ch = 1 + static_cast<int>(rng.Index(4));
  d.out_ch = 1 + static_cast<int>(rng.Index(5));
  d.kernel = 1 + static_cast<int>(rng.Index(5));
  d.stride = 1 + static_cast<int>(rng.Index(3));
  d.padding = static_cast<int>(rng.Index(3));
  d.length = d.kernel + static_cast<int>(rng.Index(20));
  return d;
}

Conv2dDims RandomConv2d(Rng& rng) {
  Conv2dDims d;
  d.batch = 1 + static_cast<int>(rng.Index(3));
  d.in_ch = 1 + static_cast<int>(rng.Index(3));
  d.out_ch = 1 + static_cast<int>(rng.Index(4));
  d.kh = 1 + static_cast<int>(rng.Index(4));
  d.kw = 1 + static_cast<int>(rng.Index(4));
  d.sh = 1 + static_cast<int>(rng.Index(2));
  d.sw = 1 + static_cast<int>(rng.Index(2));
  d.ph = static_cast<int>(rng.Index(2));
  d.pw = static_cast<int>(rng.Index(2));
  d.height = d.kh + static_cast<int>(rng.Index(8));
  d.width = d.kw + static_cast<int>(rng.Index(8));
  return d;
}

TEST(KernelsTest, LinearMatchesLoopOracleAndAcrossBackends) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const LinearDims d{1 + static_cast<int>(rng.Index(5)), 1 + static_cast<int>(rng.Index(300)),
                       1 + static_cast<int>(rng.Index(40))};
    const auto x = RandomVector(d.batch * d.in, rng);
    const auto w = RandomVector(d.out * d.in, rng);
    const auto b = RandomVector(d.out, rng);
    const auto dy = RandomVector(d.batch * d.out, rng);
    std::vector<double> ys(d.batch * d.out), yo(ys.size());
    serial::LinearForward(d, x.data(), w.data(), b.data(), ys.data());
    omp::LinearForward(d, x.data(), w.data(), b.data(), yo.data());
    EXPECT_EQ(ys, yo);
    for (int n = 0; n < d.batch; ++n) {
      for (int o = 0; o < d.out; ++o) {
        double acc = b[o];
        for (int i = 0; i < d.in; ++i) acc += w[o * d.in + i] * x[n * d.in + i];
        EXPECT_NEAR(ys[n * d.out + o], acc, 1e-12);
      }
    }
    std::vector<double> dxs(x.size()), dws(w.size()), dbs(b.size());
    std::vector<double> dxo(x.size()), dwo(w.size()), dbo(b.size());
    serial::LinearBackward(d, x.data(), w.data(), dy.data(), dxs.data(), dws.data(), dbs.data());
    omp::LinearBackward(d, x.data(), w.data(), dy.data(), dxo.data(), dwo.data(), dbo.data());
    EXPECT_EQ(dxs, dxo);
    EXPECT_EQ(dws, dwo);
    EXPECT_EQ(dbs, dbo);
  }
}

// For bias-free layers y = A x is linear, so backward must be the adjoint:
// <dy, A x'> == <A^T dy, x'> for any probe x', and likewise in the weights.
TEST(KernelsTest, Conv1dBackwardIsAdjointAndBackendsAgree) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Conv1dDims d = RandomConv1d(rng);
    if (d.OutLength() < 1) continue;
    const std::size_t xn = d.batch * d.in_ch * d.length, wn = d.out_ch * d.in_ch * d.kernel,
                      yn = d.batch * d.out_ch * d.OutLength();
    const auto x = RandomVector(xn, rng), w = RandomVector(wn, rng), dy = RandomVector(yn, rng);
    const auto xp = RandomVector(xn, rng), wp = RandomVector(wn, rng), b = RandomVector(d.out_ch, rng);

    std::vector<double> dx(xn), dw(wn), db(d.out_ch);
    serial::Conv1dBackward(d, x.data(), w.data(), dy.data(), dx.data(), dw.data(), db.data());
    std::vector<double> y(yn);
    serial::Conv1dForward(d, xp.data(), w.data(), nullptr, y.data());
    EXPECT_NEAR(Dot(dy, y), Dot(dx, xp), 1e-10);
    serial::Conv1dForward(d, x.data(), wp.data(), nullptr, y.data());
    EXPECT_NEAR(Dot(dy, y), Dot(dw, wp), 1e-10);
    EXPECT_NEAR(std::accumulate(db.begin(), db.end(), 0.0), std::accumulate(dy.begin(), dy.end(), 0.0), 1e-10);

    std::vector<double> ys(yn), yo(yn);
    serial::Conv1dForward(d, x.data(), w.data(), b.data(), ys.data());
    omp::Conv1dForward(d, x.data(), w.data(), b.data(), yo.data());
    EXPECT_EQ(ys, yo);
    std::vector<double> dxo(xn), dwo(wn), dbo(d.out_ch);
    omp::Conv1dBackward(d, x.data(), w.data(), dy.data(), dxo.data(), dwo.data(), dbo.data());
    EXPECT_EQ(dx, dxo);
    EXPECT_EQ(dw, dwo);
    EXPECT_EQ(db, dbo);
  }
}

TEST(KernelsTest, Conv2dBackwardIsAdjointAndBackendsAgree) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Conv2dDims d = RandomConv2d(rng);
    if (d.OutHeight() < 1 || d.OutWidth() < 1) continue;
    const std::size_t xn = d.batch * d.in_ch * d.height * d.width, wn = d.out_ch * d.in_ch * d.kh * d.kw,
                      yn = d.batch * d.out_ch * d.OutHeight() * d.OutWidth();
    const auto x = RandomVector(xn, rng), w = RandomVector(wn, rng), dy = RandomVector(yn, rng);
    const auto xp = RandomVector(xn, rng), wp = RandomVector(wn, rng), b = RandomVector(d.out_ch, rng);

    std::vector<double> dx(xn), dw(wn), db(d.out_ch);
    serial::Conv2dBackward(d, x.data(), w.data(), dy.data(), dx.data(), dw.data(), db.data());
    std::vector<double> y(yn);
    serial::Conv2dForward(d, xp.data(), w.data(), nullptr, y.data());
    EXPECT_NEAR(Dot(dy, y), Dot(dx, xp), 1e-10);
    serial::Conv2dForward(d, x.data(), wp.data(), nullptr, y.data());
    EXPECT_NEAR(Dot(dy, y), Dot(dw, wp), 1e-10);

    std::vector<double> ys(yn), yo(yn);
    serial::Conv2dForward(d, x.data(), w.data(), b.data(), ys.data());
    omp::Conv2dForward(d, x.data(), w.data(), b.data(), yo.data());
    EXPECT_EQ(ys, yo);
    std::vector<double> dxo(xn), dwo(wn), dbo(d.out_ch);
    omp::Conv2dBackward(d, x.data(), w.data(), dy.data(), dxo.data(), dwo.data(), dbo.data());
    EXPECT_EQ(dx, dxo);
    EXPECT_EQ(dw, dwo);
    EXPECT_EQ(db, dbo);
  }
}

TEST(KernelsTest, Conv1dHandComputed) {
  // x = [1 2 3 4], w = [1 -1], stride 2, padding 1 -> windows (0,1) (2,3) (4,0)
  const Conv1dDims d{1, 1, 1, 4, 2, 2, 1};
  const double x[4] = {1, 2, 3, 4}, w[2] = {1, -1}, b[1] = {0.5};
  double y[3];
  serial::Conv1dForward(d, x, w, b, y);
  EXPECT_EQ(d.OutLength(), 3);
  EXPECT_DOUBLE_EQ(y[0], -1 + 0.5);
  EXPECT_DOUBLE_EQ(y[1], 2 - 3 + 0.5);
  EXPECT_DOUBLE_EQ(y[2], 4 + 0.5);
}

TEST(KernelsTest, BackendSwitch) {
  const Backend before = DefaultBackend();
  SetDefaultBackend(Backend::kSerial);
  EXPECT_EQ(DefaultBackend(), Backend::kSerial);
  SetDefaultBackend(before);
}

}  // namespace
}  // namespace cadd::kernels
