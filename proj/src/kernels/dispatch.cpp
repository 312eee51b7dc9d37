// Copyright 2026 The ATL Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "atl/kernels.hpp"
#include "kernels_impl.hpp"

namespace atl::kernels {
namespace {

constexpr KernelTable kScalar{"scalar",     scalar::dot,    scalar::axpy,
                              scalar::gemv, scalar::gemv_t, scalar::ger};

constexpr KernelTable kAvx2{"avx2",     avx2::dot,    avx2::axpy,
                            avx2::gemv, avx2::gemv_t, avx2::ger};

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(__i386__)) && \
    (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  const KernelTable* avx = avx2_table();
  const char* env = std::getenv("ATL_KERNELS");
  const std::string_view want = env ? env : "auto";
  if (want == "scalar") return &kScalar;
  if (want == "avx2" && !avx) {
    throw std::runtime_error("ATL_KERNELS=avx2 but AVX2 is unavailable");
  }
  if (want != "auto" && want != "avx2") {
    throw std::runtime_error("ATL_KERNELS must be scalar, avx2 or auto");
  }
  return avx ? avx : &kScalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
  static const bool usable = avx2::compiled() && cpu_has_avx2();
  return usable ? &kAvx2 : nullptr;
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

bool select(Backend backend) {
  const KernelTable* table =
      backend == Backend::kScalar ? &kScalar : avx2_table();
  if (!table) return false;
  current().store(table, std::memory_order_relaxed);
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  return active().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace atl::kernels
