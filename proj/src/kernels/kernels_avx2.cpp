// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

// Compiled with -mavx2 -mfma. Entry points are only reached after the
// dispatcher has confirmed CPU support.

#include "kernels_impl.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace atl::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

bool compiled() { return true; }

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4),
                                                _mm256_loadu_pd(y + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* w, std::size_t rows, std::size_t cols, const double* x,
          const double* bias, double* y) {
  std::size_t r = 0;
  // Four rows per pass share each load of x.
  for (; r + 4 <= rows; r += 4) {
    const double* w0 = w + r * cols;
    const double* w1 = w0 + cols;
    const double* w2 = w1 + cols;
    const double* w3 = w2 + cols;
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd();
    __m256d a3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= cols; i += 4) {
      const __m256d vx = _mm256_loadu_pd(x + i);
      a0 = _mm256_fmadd_pd(_mm256_loadu_pd(w0 + i), vx, a0);
      a1 = _mm256_fmadd_pd(_mm256_loadu_pd(w1 + i), vx, a1);
      a2 = _mm256_fmadd_pd(_mm256_loadu_pd(w2 + i), vx, a2);
      a3 = _mm256_fmadd_pd(_mm256_loadu_pd(w3 + i), vx, a3);
    }
    double s0 = hsum(a0), s1 = hsum(a1), s2 = hsum(a2), s3 = hsum(a3);
    for (; i < cols; ++i) {
      s0 += w0[i] * x[i];
      s1 += w1[i] * x[i];
      s2 += w2[i] * x[i];
      s3 += w3[i] * x[i];
    }
    if (bias) {
      s0 += bias[r];
      s1 += bias[r + 1];
      s2 += bias[r + 2];
      s3 += bias[r + 3];
    }
    y[r] = s0;
    y[r + 1] = s1;
    y[r + 2] = s2;
    y[r + 3] = s3;
  }
  for (; r < rows; ++r) {
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

}  // namespace atl::kernels::avx2

#else

namespace atl::kernels::avx2 {

bool compiled() { return false; }
double dot(const double*, const double*, std::size_t) { return 0.0; }
void axpy(double, const double*, double*, std::size_t) {}
void gemv(const double*, std::size_t, std::size_t, const double*, const double*,
          double*) {}
void gemv_t(const double*, std::size_t, std::size_t, const double*, double*) {}
void ger(double, const double*, std::size_t, const double*, std::size_t,
         double*) {}

}  // namespace atl::kernels::avx2

#endif
