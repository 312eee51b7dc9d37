// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Dense double-precision inner loops used by the classifiers.
//
// Every kernel exists as a portable scalar reference and, on x86-64, as an
// AVX2+FMA variant compiled in its own translation unit. The active table is
// chosen once at startup from CPUID; ATL_KERNELS=scalar|avx2|auto overrides
// the choice. Variants agree to rounding, not bit-for-bit, so determinism
// holds per backend.

#include <cstddef>
#include <span>
#include <string_view>

namespace atl::kernels {

struct KernelTable {
  std::string_view name;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = W x + bias, W row-major rows x cols; bias may be null
  void (*gemv)(const double* w, std::size_t rows, std::size_t cols,
               const double* x, const double* bias, double* y);
  // y += W^T g
  void (*gemv_t)(const double* w, std::size_t rows, std::size_t cols,
                 const double* g, double* y);
  // W += alpha * u v^T
  void (*ger)(double alpha, const double* u, std::size_t rows, const double* v,
              std::size_t cols, double* w);
};

enum class Backend { kScalar, kAvx2 };

const KernelTable& scalar_table();

// Null when the binary was built without AVX2 support or the CPU lacks
// AVX2/FMA.
const KernelTable* avx2_table();

const KernelTable& active();

// Forces a backend for the rest of the process. Returns false (and leaves the
// selection unchanged) when the backend is unavailable.
bool select(Backend backend);

// Span wrappers over the active table.
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace atl::kernels
