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

#include "cadd/nn/ops.h"

#include <algorithm>
#include <cmath>

#include "cadd/common/error.h"
#include "cadd/kernels/kernels.h"

namespace cadd::nn {

namespace {

bool NeedsGrad(const Tensor& t) { return t != nullptr && t->requires_grad; }

Tensor Result(Shape shape, std::vector<double> value, std::initializer_list<Tensor> parents) {
  Tensor out = MakeTensor(std::move(shape), std::move(value));
  if (!GradEnabled()) return out;
  for (const Tensor& p : parents) {
    if (NeedsGrad(p)) out->requires_grad = true;
  }
  // Backward closures read parent values (e.g. the input for a weight
  // gradient), so every parent stays alive with the graph.
  if (out->requires_grad) {
    for (const Tensor& p : parents) {
      if (p) out->parents.push_back(p);
    }
  }
  return out;
}

void RequireRank(const Tensor& x, std::size_t rank, const char* op) {
  if (x->shape.size() != rank) {
    throw ValidationError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                          ShapeString(x->shape));
  }
}

// Elementwise op with derivative expressed through input and output.
template <typename F, typename D>
Tensor Unary(const Tensor& x, F f, D dfdx) {
  std::vector<double> y(x->numel());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = f(x->value[i]);
  Tensor out = Result(x->shape, std::move(y), {x});
  if (out->requires_grad) {
    Node* o = out.get();
    Node* xp = x.get();
    o->backward = [o, xp, dfdx] {
      double* gx = xp->mutable_grad();
      for (std::size_t i = 0; i < o->numel(); ++i) gx[i] += o->grad[i] * dfdx(xp->value[i], o->value[i]);
    };
  }
  return out;
}

// Splits a [B, C, ...] shape into batch, channel and the flattened rest.
struct Bci {
  int b;
  int c;
  int inner;
};

Bci SplitShape(const Tensor& x, const char* op) {
  if (x->shape.size() < 2) throw ValidationError(std::string(op) + ": expected [B, C, ...], got " + ShapeString(x->shape));
  const int inner = static_cast<int>(x->numel() / (static_cast<std::size_t>(x->shape[0]) * x->shape[1]));
  return {x->shape[0], x->shape[1], inner};
}

}  // namespace

Tensor Linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  RequireRank(x, 2, "linear");
  RequireRank(w, 2, "linear");
  if (x->dim(1) != w->dim(1)) {
    throw ValidationError("linear: input width " + std::to_string(x->dim(1)) + " does not match weight " +
                          ShapeString(w->shape));
  }
  const kernels::LinearDims d{x->dim(0), w->dim(1), w->dim(0)};
  std::vector<double> y(static_cast<std::size_t>(d.batch) * d.out);
  kernels::LinearForward(kernels::DefaultBackend(), d, x->value.data(), w->value.data(),
                         b ? b->value.data() : nullptr, y.data());
  Tensor out = Result({d.batch, d.out}, std::move(y), {x, w, b});
  if (out->requires_grad) {
    Node* o = out.get();
    o->backward = [o, d, x = x.get(), w = w.get(), b = b.get()] {
      kernels::LinearBackward(kernels::DefaultBackend(), d, x->value.data(), w->value.data(), o->grad.data(),
                              x->requires_grad ? x->mutable_grad() : nullptr,
                              w->requires_grad ? w->mutable_grad() : nullptr,
                              b != nullptr && b->requires_grad ? b->mutable_grad() : nullptr);
    };
  }
  return out;
}

Tensor Conv1d(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int padding) {
  RequireRank(x, 3, "conv1d");
  RequireRank(w, 3, "conv1d");
  if (x->dim(1) != w->dim(1)) {
    throw ValidationError("conv1d: input channels " + std::to_string(x->dim(1)) + " do not match weight " +
                          ShapeString(w->shape));
  }
  const kernels::Conv1dDims d{x->dim(0), x->dim(1), w->dim(0), x->dim(2), w->dim(2), stride, padding};
  const int out_len = d.OutLength();
  if (out_len < 1) throw ValidationError("conv1d: input length " + std::to_string(d.length) + " too short");
  std::vector<double> y(static_cast<std::size_t>(d.batch) * d.out_ch * out_len);
  kernels::Conv1dForward(kernels::DefaultBackend(), d, x->value.data(), w->value.data(),
                         b ? b->value.data() : nullptr, y.data());
  Tensor out = Result({d.batch, d.out_ch, out_len}, std::move(y), {x, w, b});
  if (out->requires_grad) {
    Node* o = out.get();
    o->backward = [o, d, x = x.get(), w = w.get(), b = b.get()] {
      kernels::Conv1dBackward(kernels::DefaultBackend(), d, x->value.data(), w->value.data(), o->grad.data(),
                              x->requires_grad ? x->mutable_grad() : nullptr,
                              w->requires_grad ? w->mutable_grad() : nullptr,
                              b != nullptr && b->requires_grad ? b->mutable_grad() : nullptr);
    };
  }
  return out;
}

Tensor Conv2d(const Tensor& x, const Tensor& w, const Tensor& b, int pad_h, int pad_w) {
  RequireRank(x, 4, "conv2d");
  RequireRank(w, 4, "conv2d");
  if (x->dim(1) != w->dim(1)) {
    throw ValidationError("conv2d: input channels " + std::to_string(x->dim(1)) + " do not match weight " +
                          ShapeString(w->shape));
  }
  kernels::Conv2dDims d;
  d.batch = x->dim(0);
  d.in_ch = x->dim(1);
  d.out_ch = w->dim(0);
  d.height = x->dim(2);
  d.width = x->dim(3);
  d.kh = w->dim(2);
  d.kw = w->dim(3);
  d.ph = pad_h;
  d.pw = pad_w;
  const int oh = d.OutHeight();
  const int ow = d.OutWidth();
  if (oh < 1 || ow < 1) throw ValidationError("conv2d: input " + ShapeString(x->shape) + " too small");
  std::vector<double> y(static_cast<std::size_t>(d.batch) * d.out_ch * oh * ow);
  kernels::Conv2dForward(kernels::DefaultBackend(), d, x->value.data(), w->value.data(),
                         b ? b->value.data() : nullptr, y.data());
  Tensor out = Result({d.batch, d.out_ch, oh, ow}, std::move(y), {x, w, b});
  if (out->requires_grad) {
    Node* o = out.get();
    o->backward = [o, d, x = x.get(), w = w.get(), b = b.get()] {
      kernels::Conv2dBackward(kernels::DefaultBackend(), d, x->value.data(), w->value.data(), o->grad.data(),
                              x->requires_grad ? x->mutable_grad() : nullptr,
                              w->requires_grad ? w->mutable_grad() : nullptr,
                              b != nullptr && b->requires_grad ? b->mutable_grad() : nullptr);
    };
  }
  return out;
}

Tensor LeakyRelu(const Tensor& x, double slope) {
  return Unary(
      x, [slope](double v) { return v > 0.0 ? v : slope * v; },
      [slope](double v, double) { return v > 0.0 ? 1.0 : slope; });
}

Tensor Relu(const Tensor& x) {
  return Unary(
      x, [](double v) { return v > 0.0 ? v : 0.0; }, [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor Sigmoid(const Tensor& x) {
  return Unary(
      x,
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor Abs(const Tensor& x) {
  return Unary(
      x, [](double v) { return std::abs(v); },
      [](double v, double) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Tensor Log(const Tensor& x, double eps) {
  return Unary(
      x, [eps](double v) { return std::log(v + eps); }, [eps](double v, double) { return 1.0 / (v + eps); });
}

Tensor Add(const Tensor& a, const Tensor& b) {
  if (a->shape != b->shape) {
    throw ValidationError("add: shape " + ShapeString(a->shape) + " vs " + ShapeString(b->shape));
  }
  std::vector<double> y(a->numel());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a->value[i] + b->value[i];
  Tensor out = Result(a->shape, std::move(y), {a, b});
  if (out->requires_grad) {
    Node* o = out.get();
    o->backward = [o, a = a.get(), b = b.get()] {
      for (Node* p : {a, b}) {
        if (!p->requires_grad) continue;
        double* g = p->mutable_grad();
        for (std::size_t i = 0; i < o->numel(); ++i) g[i] += o->grad[i];
      }
    };
  }
  return out;
}

Tensor ChannelScaleAdd(const Tensor& x, const Tensor& s) {
  const Bci d = SplitShape(x, "feature map scaling");
  if (s->shape != Shape{d.b, d.c}) {
    throw ValidationError("feature map scaling: scale " + ShapeString(s->shape) + " does not fit " +
                          ShapeString(x->shape));
  }
  std::vector<double> y(x->numel());
  for (int n = 0; n < d.b; ++n) {
    for (int c = 0; c < d.c; ++c) {
      const double sc = s->value[n * d.c + c];
      const std::size_t base = (static_cast<std::size_t>(n) * d.c + c) * d.inner;
      for (int i = 0; i < d.inner; ++i) y[base + i] = x->value[base + i] * sc + sc;
    }
  }
  Tensor out = Result(x->shape, std::move(y), {x, s});
  if (out->requires_grad) {
    Node* o = out.get();
    o->backward = [o, d, x = x.get(), s = s.get()] {
      double* gx = x->requires_grad ? x->mutable_grad() : nullptr;
      double* gs = s->requires_grad ? s->mutable_grad() : nullptr;
      for (int n = 0; n < d.b; ++n) {
        for (int c = 0; c < d.c; ++c) {
          const double sc = s->value[n * d.c + c];
          const std::size_t base = (static_cast<std::size_t>(n) * d.c + c) * d.inner;
          double acc = 0.0;
          for (int i = 0; i < d.inner; ++i) {
            const double g = o->grad[base + i];
            if (gx) gx[base + i] += g * sc;
            acc += g * (x->value[base + i] + 1.0);
          }
          if (gs) gs[n * d.c + c] += acc;
        }
      }
    };
  }
  return out;
}

Tensor Concat(const Tensor& a, const Tensor& b) {
  RequireRank(a, 2, "concat");
  RequireRank(b, 2, "concat");
  if (a->dim(0) != b->dim(0)) {
    throw ValidationError("concat: batch " + std::to_string(a->dim(0)) + " vs " + std::to_string(b->dim(0)));
  }
  const int rows = a->dim(0), na = a->dim(1), nb = b->dim(1);
  std::vector<double> y(static_cast<std::size_t>(rows) * (na + nb));
  for (int r = 0; r < rows; ++r) {
    std::copy_n(a->value.begin() + static_cast<long>(r) * na, na, y.begin() + static_cast<long>(r) * (na + nb));
    std::copy_n(b->value.begin() + static_cast<long>(r) * nb, nb, y.begin() + static_cast<long>(r) * (na + nb) + na);
  }
  Tensor out = Result({rows, na + nb}, std::move(y), {a, b});
  if (out->requires_grad) {
    Node* o = out.get();
    o->backward = [o, rows, na, nb, a = a.get(), b = b.get()] {
      double* ga = a->requires_grad ? a->mutable_grad() : nullptr;
      double* gb = b->requires_grad ? b->mutable_grad() : nullptr;
      for (int r = 0; r < rows; ++r) {
        const double* g = o->grad.data() + static_cast<long>(r) * (na + nb);
        if (ga) for (int i = 0; i < na; ++i) ga[r * na + i] += g[i];
        if (gb) for (int i = 0; i < nb; ++i) gb[r * nb + i] += g[na + i];
      }
    };
  }
  return out;
}

Tensor Flatten(const Tensor& x) {
  if (x->shape.empty()) throw ValidationError("flatten: scalar input");
  const int rows = x->dim(0);
  const int cols = rows == 0 ? 0 : static_cast<int>(x->numel() / rows);
  Tensor out = Result({rows, cols}, x->value, {x});
  if (out->requires_grad) {
    Node* o = out.get();
    o->backward = [o, x = x.get()] {
      double* g = x->mutable_grad();
      for (std::size_t i = 0; i < o->numel(); ++i) g[i] += o->grad[i];
    };
  }
  return out;
}

namespace {

// Shared backward for pooling ops that route each output to one input.
void RouteBackward(Node* o, Node* x, std::shared_ptr<std::vector<std::size_t>> argmax) {
  o->backward = [o, x, argmax] {
    double* g = x->mutable_grad();
    for (std::size_t i = 0; i < o->numel(); ++i) g[(*argmax)[i]] += o->grad[i];
  };
}

}  // namespace

Tensor MaxPool1d(const Tensor& x, int kernel) {
  RequireRank(x, 3, "maxpool1d");
  const int b = x->dim(0), c = x->dim(1), len = x->dim(2);
  const int k = std::max(1, std::min(kernel, len));
  const int out_len = len / k;
  std::vector<double> y(static_cast<std::size_t>(b) * c * out_len);
  auto argmax = std::make_shared<std::vector<std::size_t>>(y.size());
  for (int bc = 0; bc < b * c; ++bc) {
    for (int t = 0; t < out_len; ++t) {
      std::size_t best = static_cast<std::size_t>(bc) * len + static_cast<std::size_t>(t) * k;
      for (int j = 1; j < k; ++j) {
        const std::size_t idx = static_cast<std::size_t>(bc) * len + static_cast<std::size_t>(t) * k + j;
        if (x->value[idx] > x->value[best]) best = idx;
      }
      const std::size_t o = static_cast<std::size_t>(bc) * out_len + t;
      y[o] = x->value[best];
      (*argmax)[o] = best;
    }
  }
  Tensor out = Result({b, c, out_len}, std::move(y), {x});
  if (out->requires_grad) RouteBackward(out.get(), x.get(), argmax);
  return out;
}

Tensor MaxPool2d(const Tensor& x, int kh, int kw) {
  RequireRank(x, 4, "maxpool2d");
  const int b = x->dim(0), c = x->dim(1), h = x->dim(2), w = x->dim(3);
  kh = std::max(1, std::min(kh, h));
  kw = std::max(1, std::min(kw, w));
  const int oh = h / kh, ow = w / kw;
  std::vector<double> y(static_cast<std::size_t>(b) * c * oh * ow);
  auto argmax = std::make_shared<std::vector<std::size_t>>(y.size());
  for (int bc = 0; bc < b * c; ++bc) {
    const std::size_t plane = static_cast<std::size_t>(bc) * h * w;
    for (int i = 0; i < oh; ++i) {
      for (int j = 0; j < ow; ++j) {
        std::size_t best = plane + static_cast<std::size_t>(i * kh) * w + j * kw;
        for (int u = 0; u < kh; ++u) {
          for (int v = 0; v < kw; ++v) {
            const std::size_t idx = plane + static_cast<std::size_t>(i * kh + u) * w + j * kw + v;
            if (x->value[idx] > x->value[best]) best = idx;
          }
        }
        const std::size_t o = (static_cast<std::size_t>(bc) * oh + i) * ow + j;
        y[o] = x->value[best];
        (*argmax)[o] = best;
      }
    }
  }
  Tensor out = Result({b, c, oh, ow}, std::move(y), {x});
  if (out->requires_grad) RouteBackward(out.get(), x.get(), argmax);
  return out;
}

Tensor Mfm(const Tensor& x) {
  const Bci d = SplitShape(x, "mfm");
  if (d.c % 2 != 0) throw ValidationError("mfm: odd channel count " + std::to_string(d.c));
  const int half = d.c / 2;
  Shape shape = x->shape;
  shape[1] = half;
  std::vector<double> y(x->numel() / 2);
  auto argmax = std::make_shared<std::vector<std::size_t>>(y.size());
  for (int n = 0; n < d.b; ++n) {
    for (int c = 0; c < half; ++c) {
      for (int i = 0; i < d.inner; ++i) {
        const std::size_t lo = (static_cast<std::size_t>(n) * d.c + c) * d.inner + i;
        const std::size_t hi = lo + static_cast<std::size_t>(half) * d.inner;
        const std::size_t o = (static_cast<std::size_t>(n) * half + c) * d.inner + i;
        const std::size_t pick = x->value[hi] > x->value[lo] ? hi : lo;
        y[o] = x->value[pick];
        (*argmax)[o] = pick;
      }
    }
  }
  Tensor out = Result(std::move(shape), std::move(y), {x});
  if (out->requires_grad) RouteBackward(out.get(), x.get(), argmax);
  return out;
}

Tensor GlobalAvgPool(const Tensor& x) {
  const Bci d = SplitShape(x, "global average pool");
  std::vector<double> y(static_cast<std::size_t>(d.b) * d.c);
  for (std::size_t r = 0; r < y.size(); ++r) {
    double acc = 0.0;
    for (int i = 0; i < d.inner; ++i) acc += x->value[r * d.inner + i];
    y[r] = acc / d.inner;
  }
  Tensor out = Result({d.b, d.c}, std::move(y), {x});
  if (out->requires_grad) {
    Node* o = out.get();
    o->backward = [o, d, x = x.get()] {
      double* g = x->mutable_grad();
      for (std::size_t r = 0; r < o->numel(); ++r) {
        const double v = o->grad[r] / d.inner;
        for (int i = 0; i < d.inner; ++i) g[r * d.inner + i] += v;
      }
    };
  }
  return out;
}

Tensor AdaptiveAvgPool2d(const Tensor& x, int oh, int ow) {
  RequireRank(x, 4, "adaptive average pool");
  const int b = x->dim(0), c = x->dim(1), h = x->dim(2), w = x->dim(3);
  auto bin = [](int i, int out, int in) {
    const int start = (i * in) / out;
    const int end = ((i + 1) * in + out - 1) / out;
    return std::pair<int, int>{start, end};
  };
  std::vector<double> y(static_cast<std::size_t>(b) * c * oh * ow);
  for (int bc = 0; bc < b * c; ++bc) {
    const std::size_t plane = static_cast<std::size_t>(bc) * h * w;
    for (int i = 0; i < oh; ++i) {
      const auto [h0, h1] = bin(i, oh, h);
      for (int j = 0; j < ow; ++j) {
        const auto [w0, w1] = bin(j, ow, w);
        double acc = 0.0;
        for (int u = h0; u < h1; ++u) {
          for (int v = w0; v < w1; ++v) acc += x->value[plane + static_cast<std::size_t>(u) * w + v];
        }
        y[(static_cast<std::size_t>(bc) * oh + i) * ow + j] = acc / ((h1 - h0) * (w1 - w0));
      }
    }
  }
  Tensor out = Result({b, c, oh, ow}, std::move(y), {x});
  if (out->requires_grad) {
    Node* o = out.get();
    o->backward = [o, b, c, h, w, oh, ow, bin, x = x.get()] {
      double* g = x->mutable_grad();
      for (int bc = 0; bc < b * c; ++bc) {
        const std::size_t plane = static_cast<std::size_t>(bc) * h * w;
        for (int i = 0; i < oh; ++i) {
          const auto [h0, h1] = bin(i, oh, h);
          for (int j = 0; j < ow; ++j) {
            const auto [w0, w1] = bin(j, ow, w);
            const double v = o->grad[(static_cast<std::size_t>(bc) * oh + i) * ow + j] / ((h1 - h0) * (w1 - w0));
            for (int u = h0; u < h1; ++u) {
              for (int q = w0; q < w1; ++q) g[plane + static_cast<std::size_t>(u) * w + q] += v;
            }
          }
        }
      }
    };
  }
  return out;
}

Tensor StatsPool(const Tensor& x) {
  RequireRank(x, 3, "stats pool");
  const int b = x->dim(0), c = x->dim(1), len = x->dim(2);
  constexpr double kVarFloor = 1e-5;
  std::vector<double> y(static_cast<std::size_t>(b) * 2 * c);
  auto mean = std::make_shared<std::vector<double>>(static_cast<std::size_t>(b) * c);
  auto stdev = std::make_shared<std::vector<double>>(static_cast<std::size_t>(b) * c);
  for (int n = 0; n < b; ++n) {
    for (int ch = 0; ch < c; ++ch) {
      const double* row = x->value.data() + (static_cast<std::size_t>(n) * c + ch) * len;
      double m = 0.0;
      for (int t = 0; t < len; ++t) m += row[t];
      m /= len;
      double v = 0.0;
      for (int t = 0; t < len; ++t) v += (row[t] - m) * (row[t] - m);
      const double s = std::sqrt(v / len + kVarFloor);
      (*mean)[n * c + ch] = m;
      (*stdev)[n * c + ch] = s;
      y[static_cast<std::size_t>(n) * 2 * c + ch] = m;
      y[static_cast<std::size_t>(n) * 2 * c + c + ch] = s;
    }
  }
  Tensor out = Result({b, 2 * c}, std::move(y), {x});
  if (out->requires_grad) {
    Node* o = out.get();
    o->backward = [o, b, c, len, mean, stdev, x = x.get()] {
      double* g = x->mutable_grad();
      for (int n = 0; n < b; ++n) {
        for (int ch = 0; ch < c; ++ch) {
          const double gm = o->grad[static_cast<std::size_t>(n) * 2 * c + ch] / len;
          const double gs = o->grad[static_cast<std::size_t>(n) * 2 * c + c + ch] / (len * (*stdev)[n * c + ch]);
          const double m = (*mean)[n * c + ch];
          const std::size_t base = (static_cast<std::size_t>(n) * c + ch) * len;
          for (int t = 0; t < len; ++t) g[base + t] += gm + gs * (x->value[base + t] - m);
        }
      }
    };
  }
  return out;
}

Tensor MeanNormalize(const Tensor& x) {
  RequireRank(x, 3, "mean normalize");
  const int rows = x->dim(0) * x->dim(1), len = x->dim(2);
  std::vector<double> y(x->numel());
  for (int r = 0; r < rows; ++r) {
    const double* row = x->value.data() + static_cast<std::size_t>(r) * len;
    double m = 0.0;
    for (int t = 0; t < len; ++t) m += row[t];
    m /= len;
    for (int t = 0; t < len; ++t) y[static_cast<std::size_t>(r) * len + t] = row[t] - m;
  }
  Tensor out = Result(x->shape, std::move(y), {x});
  if (out->requires_grad) {
    Node* o = out.get();
    o->backward = [o, rows, len, x = x.get()] {
      double* g = x->mutable_grad();
      for (int r = 0; r < rows; ++r) {
        const double* go = o->grad.data() + static_cast<std::size_t>(r) * len;
        double m = 0.0;
        for (int t = 0; t < len; ++t) m += go[t];
        m /= len;
        for (int t = 0; t < len; ++t) g[static_cast<std::size_t>(r) * len + t] += go[t] - m;
      }
    };
  }
  return out;
}

Tensor BatchNorm(const Tensor& x, const Tensor& gamma, const Tensor& beta, const Tensor& running_mean,
                 const Tensor& running_var, bool training, double momentum, double eps) {
  const Bci d = SplitShape(x, "batchnorm");
  for (const Tensor* t : {&gamma, &beta, &running_mean, &running_var}) {
    if ((*t)->numel() != static_cast<std::size_t>(d.c)) {
      throw ValidationError("batchnorm: " + std::to_string(d.c) + " channels but parameter " +
                            ShapeString((*t)->shape));
    }
  }
  const double count = static_cast<double>(d.b) * d.inner;
  auto mean = std::make_shared<std::vector<double>>(d.c);
  auto inv_std = std::make_shared<std::vector<double>>(d.c);
  auto at = [d](int n, int c, int i) { return (static_cast<std::size_t>(n) * d.c + c) * d.inner + i; };
  for (int c = 0; c < d.c; ++c) {
    if (training) {
      double m = 0.0;
      for (int n = 0; n < d.b; ++n)
        for (int i = 0; i < d.inner; ++i) m += x->value[at(n, c, i)];
      m /= count;
      double v = 0.0;
      for (int n = 0; n < d.b; ++n)
        for (int i = 0; i < d.inner; ++i) v += (x->value[at(n, c, i)] - m) * (x->value[at(n, c, i)] - m);
      (*mean)[c] = m;
      (*inv_std)[c] = 1.0 / std::sqrt(v / count + eps);
      const double unbiased = count > 1 ? v / (count - 1) : v;
      running_mean->value[c] = (1.0 - momentum) * running_mean->value[c] + momentum * m;
      running_var->value[c] = (1.0 - momentum) * running_var->value[c] + momentum * unbiased;
    } else {
      (*mean)[c] = running_mean->value[c];
      (*inv_std)[c] = 1.0 / std::sqrt(running_var->value[c] + eps);
    }
  }
  std::vector<double> y(x->numel());
  for (int n = 0; n < d.b; ++n) {
    for (int c = 0; c < d.c; ++c) {
      for (int i = 0; i < d.inner; ++i) {
        const std::size_t k = at(n, c, i);
        y[k] = gamma->value[c] * (x->value[k] - (*mean)[c]) * (*inv_std)[c] + beta->value[c];
      }
    }
  }
  Tensor out = Result(x->shape, std::move(y), {x, gamma, beta});
  if (out->requires_grad) {
    Node* o = out.get();
    o->backward = [o, d, at, count, training, mean, inv_std, x = x.get(), gamma = gamma.get(), beta = beta.get()] {
      double* gx = x->requires_grad ? x->mutable_grad() : nullptr;
      double* gg = gamma->requires_grad ? gamma->mutable_grad() : nullptr;
      double* gb = beta->requires_grad ? beta->mutable_grad() : nullptr;
      for (int c = 0; c < d.c; ++c) {
        const double m = (*mean)[c], is = (*inv_std)[c];
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (int n = 0; n < d.b; ++n) {
          for (int i = 0; i < d.inner; ++i) {
            const std::size_t k = at(n, c, i);
            sum_dy += o->grad[k];
            sum_dy_xhat += o->grad[k] * (x->value[k] - m) * is;
          }
        }
        if (gg) gg[c] += sum_dy_xhat;
        if (gb) gb[c] += sum_dy;
        if (!gx) continue;
        const double gm = gamma->value[c];
        for (int n = 0; n < d.b; ++n) {
          for (int i = 0; i < d.inner; ++i) {
            const std::size_t k = at(n, c, i);
            if (training) {
              const double xhat = (x->value[k] - m) * is;
              gx[k] += gm * is * (o->grad[k] - sum_dy / count - xhat * sum_dy_xhat / count);
            } else {
              gx[k] += gm * is * o->grad[k];
            }
          }
        }
      }
    };
  }
  return out;
}

double Bce(double y, double p) {
  const double pc = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
  return -(y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc));
}

Tensor BceLoss(const Tensor& p, const std::vector<double>& labels) {
  if (p->numel() != labels.size() || p->shape.empty() || p->dim(0) != static_cast<int>(labels.size())) {
    throw ValidationError("bce: " + std::to_string(labels.size()) + " labels for predictions " +
                          ShapeString(p->shape));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) total += Bce(labels[i], p->value[i]);
  const double n = static_cast<double>(labels.size());
  Tensor out = Result({1}, {total / n}, {p});
  if (out->requires_grad) {
    Node* o = out.get();
    o->backward = [o, n, labels, p = p.get()] {
      double* g = p->mutable_grad();
      for (std::size_t i = 0; i < labels.size(); ++i) {
        const double v = p->value[i];
        if (v < kProbClamp || v > 1.0 - kProbClamp) continue;
        const double y = labels[i];
        g[i] += o->grad[0] * (-y / v + (1.0 - y) / (1.0 - v)) / n;
      }
    };
  }
  return out;
}

}  // namespace cadd::nn
