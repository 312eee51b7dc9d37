// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "atl/kernels.hpp"

namespace {

using atl::kernels::KernelTable;

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

// Rounding differs between accumulation orders; bound by n * eps * sum|terms|.
void check_close(double a, double b, double magnitude) {
  CHECK(std::abs(a - b) <= 1e-12 * (1.0 + magnitude));
}

void check_tables_agree(const KernelTable& ref, const KernelTable& simd) {
  std::mt19937_64 rng(42);
  // Sizes cover empty input, partial vectors and every tail length.
  for (const std::size_t n : {0, 1, 3, 4, 5, 7, 8, 9, 15, 16, 17, 33, 64, 129, 528}) {
    const auto a = random_values(rng, n);
    const auto b = random_values(rng, n);
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
    check_close(ref.dot(a.data(), b.data(), n), simd.dot(a.data(), b.data(), n), mag);

    auto y1 = random_values(rng, n);
    auto y2 = y1;
    ref.axpy(0.75, a.data(), y1.data(), n);
    simd.axpy(0.75, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) check_close(y1[i], y2[i], 4.0);
  }
  for (const std::size_t rows : {1, 3, 4, 5, 9, 60}) {
    for (const std::size_t cols : {1, 2, 4, 7, 16, 33}) {
      const auto w = random_values(rng, rows * cols);
      const auto x = random_values(rng, cols);
      const auto bias = random_values(rng, rows);
      std::vector<double> y1(rows), y2(rows);
      ref.gemv(w.data(), rows, cols, x.data(), bias.data(), y1.data());
      simd.gemv(w.data(), rows, cols, x.data(), bias.data(), y2.data());
      for (std::size_t r = 0; r < rows; ++r) check_close(y1[r], y2[r], 4.0 * cols + 2.0);
      ref.gemv(w.data(), rows, cols, x.data(), nullptr, y1.data());
      simd.gemv(w.data(), rows, cols, x.data(), nullptr, y2.data());
      for (std::size_t r = 0; r < rows; ++r) check_close(y1[r], y2[r], 4.0 * cols);

      auto g = random_values(rng, rows);
      g[0] = 0.0;  // exercise the zero-skip
      std::vector<double> t1(cols, 0.5), t2(cols, 0.5);
      ref.gemv_t(w.data(), rows, cols, g.data(), t1.data());
      simd.gemv_t(w.data(), rows, cols, g.data(), t2.data());
      for (std::size_t c = 0; c < cols; ++c) check_close(t1[c], t2[c], 4.0 * rows + 1.0);

      auto m1 = w;
      auto m2 = w;
      ref.ger(-0.3, g.data(), rows, x.data(), cols, m1.data());
      simd.ger(-0.3, g.data(), rows, x.data(), cols, m2.data());
      for (std::size_t i = 0; i < m1.size(); ++i) check_close(m1[i], m2[i], 4.0);
    }
  }
}

}  // namespace

TEST_CASE("scalar kernels compute the textbook definitions") {
  const auto& k = atl::kernels::scalar_table();
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  CHECK(k.dot(a.data(), b.data(), 3) == 32.0);
  std::vector<double> w{1, 2, 3, 4, 5, 6};  // 2 x 3
  std::vector<double> y(2);
  const std::vector<double> bias{1, -1};
  k.gemv(w.data(), 2, 3, a.data(), bias.data(), y.data());
  CHECK(y == std::vector<double>{15, 31});
  std::vector<double> t(3, 0.0);
  const std::vector<double> g{1, 2};
  k.gemv_t(w.data(), 2, 3, g.data(), t.data());
  CHECK(t == std::vector<double>{9, 12, 15});
  k.ger(1.0, g.data(), 2, a.data(), 3, w.data());
  CHECK(w == std::vector<double>{2, 4, 6, 6, 9, 12});
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  const KernelTable* avx = atl::kernels::avx2_table();
  if (!avx) {
    MESSAGE("AVX2 unavailable on this host; equivalence test skipped");
    return;
  }
  check_tables_agree(atl::kernels::scalar_table(), *avx);
}

TEST_CASE("backend selection round-trips") {
  const auto& before = atl::kernels::active();
  REQUIRE(atl::kernels::select(atl::kernels::Backend::kScalar));
  CHECK(atl::kernels::active().name == "scalar");
  if (atl::kernels::avx2_table()) {
    REQUIRE(atl::kernels::select(atl::kernels::Backend::kAvx2));
    CHECK(atl::kernels::active().name == "avx2");
  } else {
    CHECK_FALSE(atl::kernels::select(atl::kernels::Backend::kAvx2));
  }
  atl::kernels::select(before.name == "avx2" ? atl::kernels::Backend::kAvx2
                                             : atl::kernels::Backend::kScalar);
}

TEST_CASE("span wrappers reject mismatched sizes") {
  const std::vector<double> a(3), b(4);
  CHECK_THROWS_AS(atl::kernels::dot(a, b), std::invalid_argument);
}
