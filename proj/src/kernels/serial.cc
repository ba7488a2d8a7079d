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

#include <cstddef>

#include "cadd/kernels/kernels.h"

namespace cadd::kernels::serial {

namespace {

// R batch rows against one weight row: R independent add chains, each
// output still summed over i in ascending order.
template <int R>
void LinearRows(const LinearDims& d, const double* x, const double* wo, double bias, int n, int o, double* y) {
  const double* xr[R];
  double acc[R];
  for (int r = 0; r < R; ++r) {
    xr[r] = x + static_cast<std::size_t>(n + r) * d.in;
    acc[r] = 0.0;
  }
  for (int i = 0; i < d.in; ++i) {
    for (int r = 0; r < R; ++r) acc[r] += xr[r][i] * wo[i];
  }
  for (int r = 0; r < R; ++r) y[(n + r) * d.out + o] = acc[r] + bias;
}

}  // namespace

void LinearForward(const LinearDims& d, const double* x, const double* w, const double* b, double* y) {
  // Output-major so each weight row is streamed once for the whole batch.
  for (int o = 0; o < d.out; ++o) {
    const double* wo = w + static_cast<std::size_t>(o) * d.in;
    const double bias = b != nullptr ? b[o] : 0.0;
    int n = 0;
    for (; n + 4 <= d.batch; n += 4) LinearRows<4>(d, x, wo, bias, n, o, y);
    switch (d.batch - n) {
      case 3: LinearRows<3>(d, x, wo, bias, n, o, y); break;
      case 2: LinearRows<2>(d, x, wo, bias, n, o, y); break;
      case 1: LinearRows<1>(d, x, wo, bias, n, o, y); break;
      default: break;
    }
  }
}

void LinearBackward(const LinearDims& d, const double* x, const double* w, const double* dy, double* dx, double* dw,
                    double* db) {
  if (dx != nullptr) {
    for (int n = 0; n < d.batch; ++n) {
      for (int o = 0; o < d.out; ++o) {
        const double g = dy[n * d.out + o];
        for (int i = 0; i < d.in; ++i) dx[n * d.in + i] += g * w[o * d.in + i];
      }
    }
  }
  if (dw != nullptr) {
    for (int o = 0; o < d.out; ++o) {
      for (int i = 0; i < d.in; ++i) {
        double acc = 0.0;
        for (int n = 0; n < d.batch; ++n) acc += dy[n * d.out + o] * x[n * d.in + i];
        dw[o * d.in + i] += acc;
      }
    }
  }
  if (db != nullptr) {
    for (int o = 0; o < d.out; ++o) {
      double acc = 0.0;
      for (int n = 0; n < d.batch; ++n) acc += dy[n * d.out + o];
      db[o] += acc;
    }
  }
}

void Conv1dForward(const Conv1dDims& d, const double* x, const double* w, const double* b, double* y) {
  const int out_len = d.OutLength();
  for (int n = 0; n < d.batch; ++n) {
    for (int co = 0; co < d.out_ch; ++co) {
      for (int t = 0; t < out_len; ++t) {
        double acc = 0.0;
        for (int ci = 0; ci < d.in_ch; ++ci) {
          const double* xr = x + (static_cast<long>(n) * d.in_ch + ci) * d.length;
          const double* wr = w + (static_cast<long>(co) * d.in_ch + ci) * d.kernel;
          for (int k = 0; k < d.kernel; ++k) {
            const int l = t * d.stride + k - d.padding;
            if (l >= 0 && l < d.length) acc += xr[l] * wr[k];
          }
        }
        y[(static_cast<long>(n) * d.out_ch + co) * out_len + t] = acc + (b != nullptr ? b[co] : 0.0);
      }
    }
  }
}

void Conv1dBackward(const Conv1dDims& d, const double* x, const double* w, const double* dy, double* dx, double* dw,
                    double* db) {
  const int out_len = d.OutLength();
  if (dx != nullptr) {
    for (int n = 0; n < d.batch; ++n) {
      for (int ci = 0; ci < d.in_ch; ++ci) {
        double* dxr = dx + (static_cast<long>(n) * d.in_ch + ci) * d.length;
        for (int co = 0; co < d.out_ch; ++co) {
          const double* dyr = dy + (static_cast<long>(n) * d.out_ch + co) * out_len;
          const double* wr = w + (static_cast<long>(co) * d.in_ch + ci) * d.kernel;
          for (int t = 0; t < out_len; ++t) {
            for (int k = 0; k < d.kernel; ++k) {
              const int l = t * d.stride + k - d.padding;
              if (l >= 0 && l < d.length) dxr[l] += dyr[t] * wr[k];
            }
          }
        }
      }
    }
  }
  if (dw != nullptr) {
    for (int co = 0; co < d.out_ch; ++co) {
      for (int ci = 0; ci < d.in_ch; ++ci) {
        for (int k = 0; k < d.kernel; ++k) {
          double acc = 0.0;
          for (int n = 0; n < d.batch; ++n) {
            const double* dyr = dy + (static_cast<long>(n) * d.out_ch + co) * out_len;
            const double* xr = x + (static_cast<long>(n) * d.in_ch + ci) * d.length;
            for (int t = 0; t < out_len; ++t) {
              const int l = t * d.stride + k - d.padding;
              if (l >= 0 && l < d.length) acc += dyr[t] * xr[l];
            }
          }
          dw[(static_cast<long>(co) * d.in_ch + ci) * d.kernel + k] += acc;
        }
      }
    }
  }
  if (db != nullptr) {
    for (int co = 0; co < d.out_ch; ++co) {
      double acc = 0.0;
      for (int n = 0; n < d.batch; ++n) {
        const double* dyr = dy + (static_cast<long>(n) * d.out_ch + co) * out_len;
        for (int t = 0; t < out_len; ++t) acc += dyr[t];
      }
      db[co] += acc;
    }
  }
}

void Conv2dForward(const Conv2dDims& d, const double* x, const double* w, const double* b, double* y) {
  const int oh = d.OutHeight(), ow = d.OutWidth();
  const long plane = static_cast<long>(d.height) * d.width;
  for (int n = 0; n < d.batch; ++n) {
    for (int co = 0; co < d.out_ch; ++co) {
      for (int i = 0; i < oh; ++i) {
        for (int j = 0; j < ow; ++j) {
          double acc = 0.0;
          for (int ci = 0; ci < d.in_ch; ++ci) {
            const double* xp = x + (static_cast<long>(n) * d.in_ch + ci) * plane;
            const double* wp = w + (static_cast<long>(co) * d.in_ch + ci) * d.kh * d.kw;
            for (int u = 0; u < d.kh; ++u) {
              const int r = i * d.sh + u - d.ph;
              if (r < 0 || r >= d.height) continue;
              for (int v = 0; v < d.kw; ++v) {
                const int c = j * d.sw + v - d.pw;
                if (c >= 0 && c < d.width) acc += xp[static_cast<long>(r) * d.width + c] * wp[u * d.kw + v];
              }
            }
          }
          y[((static_cast<long>(n) * d.out_ch + co) * oh + i) * ow + j] = acc + (b != nullptr ? b[co] : 0.0);
        }
      }
    }
  }
}

void Conv2dBackward(const Conv2dDims& d, const double* x, const double* w, const double* dy, double* dx, double* dw,
                    double* db) {
  const int oh = d.OutHeight(), ow = d.OutWidth();
  const long plane = static_cast<long>(d.height) * d.width;
  const long out_plane = static_cast<long>(oh) * ow;
  if (dx != nullptr) {
    for (int n = 0; n < d.batch; ++n) {
      for (int ci = 0; ci < d.in_ch; ++ci) {
        double* dxp = dx + (static_cast<long>(n) * d.in_ch + ci) * plane;
        for (int co = 0; co < d.out_ch; ++co) {
          const double* dyp = dy + (static_cast<long>(n) * d.out_ch + co) * out_plane;
          const double* wp = w + (static_cast<long>(co) * d.in_ch + ci) * d.kh * d.kw;
          for (int i = 0; i < oh; ++i) {
            for (int j = 0; j < ow; ++j) {
              const double g = dyp[static_cast<long>(i) * ow + j];
              for (int u = 0; u < d.kh; ++u) {
                const int r = i * d.sh + u - d.ph;
                if (r < 0 || r >= d.height) continue;
                for (int v = 0; v < d.kw; ++v) {
                  const int c = j * d.sw + v - d.pw;
                  if (c >= 0 && c < d.width) dxp[static_cast<long>(r) * d.width + c] += g * wp[u * d.kw + v];
                }
              }
            }
          }
        }
      }
    }
  }
  if (dw != nullptr) {
    for (int co = 0; co < d.out_ch; ++co) {
      for (int ci = 0; ci < d.in_ch; ++ci) {
        for (int u = 0; u < d.kh; ++u) {
          for (int v = 0; v < d.kw; ++v) {
            double acc = 0.0;
            for (int n = 0; n < d.batch; ++n) {
              const double* dyp = dy + (static_cast<long>(n) * d.out_ch + co) * out_plane;
              const double* xp = x + (static_cast<long>(n) * d.in_ch + ci) * plane;
              for (int i = 0; i < oh; ++i) {
                const int r = i * d.sh + u - d.ph;
                if (r < 0 || r >= d.height) continue;
                for (int j = 0; j < ow; ++j) {
                  const int c = j * d.sw + v - d.pw;
                  if (c >= 0 && c < d.width) acc += dyp[static_cast<long>(i) * ow + j] * xp[static_cast<long>(r) * d.width + c];
                }
              }
            }
            dw[((static_cast<long>(co) * d.in_ch + ci) * d.kh + u) * d.kw + v] += acc;
          }
        }
      }
    }
  }
  if (db != nullptr) {
    for (int co = 0; co < d.out_ch; ++co) {
      double acc = 0.0;
      for (int n = 0; n < d.batch; ++n) {
        const double* dyp = dy + (static_cast<long>(n) * d.out_ch + co) * out_plane;
        for (long p = 0; p < out_plane; ++p) acc += dyp[p];
      }
      db[co] += acc;
    }
  }
}

}  // namespace cadd::kernels::serial
