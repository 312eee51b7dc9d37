// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#include "kernels_impl.hpp"

namespace atl::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* w, std::size_t rows, std::size_t cols, const double* x,
          const double* bias, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double acc = dot(w + r * cols, x, cols);
    y[r] = bias ? acc + bias[r] : acc;
  }
}

void gemv_t(const double* w, std::size_t rows, std::size_t cols,
            const double* g, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] == 0.0) continue;
    axpy(g[r], w + r * cols, y, cols);
  }
}

void ger(double alpha, const double* u, std::size_t rows, const double* v,
         std::size_t cols, double* w) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double s = alpha * u[r];
    if (s == 0.0) continue;
    axpy(s, v, w + r * cols, cols);
  }
}

}  // namespace atl::kernels::scalar
