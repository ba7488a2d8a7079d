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

#include <atomic>

#include "cadd/kernels/kernels.h"

namespace cadd::kernels {

namespace {
std::atomic<Backend> g_backend{Backend::kOpenMP};
}  // namespace

void SetDefaultBackend(Backend backend) { g_backend = backend; }
Backend DefaultBackend() { return g_backend; }

void LinearForward(Backend be, const LinearDims& d, const double* x, const double* w, const double* b, double* y) {
  be == Backend::kOpenMP ? omp::LinearForward(d, x, w, b, y) : serial::LinearForward(d, x, w, b, y);
}

void LinearBackward(Backend be, const LinearDims& d, const double* x, const double* w, const double* dy, double* dx,
                    double* dw, double* db) {
  be == Backend::kOpenMP ? omp::LinearBackward(d, x, w, dy, dx, dw, db) : serial::LinearBackward(d, x, w, dy, dx, dw, db);
}

void Conv1dForward(Backend be, const Conv1dDims& d, const double* x, const double* w, const double* b, double* y) {
  be == Backend::kOpenMP ? omp::Conv1dForward(d, x, w, b, y) : serial::Conv1dForward(d, x, w, b, y);
}

void Conv1dBackward(Backend be, const Conv1dDims& d, const double* x, const double* w, const double* dy, double* dx,
                    double* dw, double* db) {
  be == Backend::kOpenMP ? omp::Conv1dBackward(d, x, w, dy, dx, dw, db) : serial::Conv1dBackward(d, x, w, dy, dx, dw, db);
}

void Conv2dForward(Backend be, const Conv2dDims& d, const double* x, const double* w, const double* b, double* y) {
  be == Backend::kOpenMP ? omp::Conv2dForward(d, x, w, b, y) : serial::Conv2dForward(d, x, w, b, y);
}

void Conv2dBackward(Backend be, const Conv2dDims& d, const double* x, const double* w, const double* dy, double* dx,
                    double* dw, double* db) {
  be == Backend::kOpenMP ? omp::Conv2dBackward(d, x, w, dy, dx, dw, db) : serial::Conv2dBackward(d, x, w, dy, dx, dw, db);
}

}  // namespace cadd::kernels
