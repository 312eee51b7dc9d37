// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Raw-pointer kernel entry points. The AVX2 translation unit is compiled with
// -mavx2 -mfma, so it must include nothing beyond this header and intrinsics:
// any inline library template instantiated there could leak AVX2 code into
// the scalar path through the linker.

#include <cstddef>

namespace atl::kernels::scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* w, std::size_t rows, std::size_t cols, const double* x,
          const double* bias, double* y);
void gemv_t(const double* w, std::size_t rows, std::size_t cols,
            const double* g, double* y);
void ger(double alpha, const double* u, std::size_t rows, const double* v,
         std::size_t cols, double* w);
}  // namespace atl::kernels::scalar

namespace atl::kernels::avx2 {
bool compiled();
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* w, std::size_t rows, std::size_t cols, const double* x,
          const double* bias, double* y);
void gemv_t(const double* w, std::size_t rows, std::size_t cols,
            const double* g, double* y);
void ger(double alpha, const double* u, std::size_t rows, const double* v,
         std::size_t cols, double* w);
}  // namespace atl::kernels::avx2
