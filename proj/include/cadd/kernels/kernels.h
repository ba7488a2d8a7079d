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

#ifndef CADD_KERNELS_KERNELS_H_
#define CADD_KERNELS_KERNELS_H_

// Dense layer kernels in two flavours: a plain serial reference and an
// OpenMP version. The OpenMP kernels split work over output elements only,
// so each output is summed in the same order as the reference and the two
// agree bit for bit.

namespace cadd::kernels {

enum class Backend { kSerial, kOpenMP };

// Process-wide default used by the autograd ops.
void SetDefaultBackend(Backend backend);
Backend DefaultBackend();

struct LinearDims {
  int batch = 0;
  int in = 0;
  int out = 0;
};

struct Conv1dDims {
  int batch = 0;
  int in_ch = 0;
  int out_ch = 0;
  int length = 0;
  int kernel = 1;
  int stride = 1;
  int padding = 0;

  int OutLength() const { return (length + 2 * padding - kernel) / stride + 1; }
};

struct Conv2dDims {
  int batch = 0;
  int in_ch = 0;
  int out_ch = 0;
  int height = 0;
  int width = 0;
  int kh = 1;
  int kw = 1;
  int sh = 1;
  int sw = 1;
  int ph = 0;
  int pw = 0;

  int OutHeight() const { return (height + 2 * ph - kh) / sh + 1; }
  int OutWidth() const { return (width + 2 * pw - kw) / sw + 1; }
};

// Layouts (row-major): x [batch, in], w [out, in], b [out], y [batch, out].
// Backward accumulates (+=) into dx, dw, db; dx may be null.
void LinearForward(Backend be, const LinearDims& d, const double* x, const double* w, const double* b, double* y);
void LinearBackward(Backend be, const LinearDims& d, const double* x, const double* w, const double* dy, double* dx,
                    double* dw, double* db);

// x [batch, in_ch, length], w [out_ch, in_ch, kernel], y [batch, out_ch, out_len].
void Conv1dForward(Backend be, const Conv1dDims& d, const double* x, const double* w, const double* b, double* y);
void Conv1dBackward(Backend be, const Conv1dDims& d, const double* x, const double* w, const double* dy, double* dx,
                    double* dw, double* db);

// x [batch, in_ch, height, width], w [out_ch, in_ch, kh, kw].
void Conv2dForward(Backend be, const Conv2dDims& d, const double* x, const double* w, const double* b, double* y);
void Conv2dBackward(Backend be, const Conv2dDims& d, const double* x, const double* w, const double* dy, double* dx,
                    double* dw, double* db);

namespace serial {
void LinearForward(const LinearDims& d, const double* x, const double* w, const double* b, double* y);
void LinearBackward(const LinearDims& d, const double* x, const double* w, const double* dy, double* dx, double* dw,
                    double* db);
void Conv1dForward(const Conv1dDims& d, const double* x, const double* w, const double* b, double* y);
void Conv1dBackward(const Conv1dDims& d, const double* x, const double* w, const double* dy, double* dx, double* dw,
                    double* db);
void Conv2dForward(const Conv2dDims& d, const double* x, const double* w, const double* b, double* y);
void Conv2dBackward(const Conv2dDims& d, const double* x, const double* w, const double* dy, double* dx, double* dw,
                    double* db);
}  // namespace serial

namespace omp {
void LinearForward(const LinearDims& d, const double* x, const double* w, const double* b, double* y);
void LinearBackward(const LinearDims& d, const double* x, const double* w, const double* dy, double* dx, double* dw,
                    double* db);
void Conv1dForward(const Conv1dDims& d, const double* x, const double* w, const double* b, double* y);
void Conv1dBackward(const Conv1dDims& d, const double* x, const double* w, const double* dy, double* dx, double* dw,
                    double* db);
void Conv2dForward(const Conv2dDims& d, const double* x, const double* w, const double* b, double* y);
void Conv2dBackward(const Conv2dDims& d, const double* x, const double* w, const double* dy, double* dx, double* dw,
                    double* db);
}  // namespace omp

}  // namespace cadd::kernels

#endif  // CADD_KERNELS_KERNELS_H_
