// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "credence/error.hpp"
#include "credence/simd/kernels.hpp"

namespace credence::simd {
namespace {

bool cpu_has_avx2_fma() {
#if defined(CREDENCE_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  const char* env = std::getenv("CREDENCE_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
  return cpu_has_avx2_fma() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  return isa == Isa::Scalar || (isa == Isa::Avx2 && cpu_has_avx2_fma());
}

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!isa_supported(isa))
    fail(ErrorCode::InvalidArgument,
         std::string("SIMD variant not supported on this CPU: ") + isa_name(isa));
  selected().store(isa, std::memory_order_relaxed);
}

const KernelTable& kernels(Isa isa) {
#if defined(CREDENCE_HAVE_AVX2_KERNELS)
  if (isa == Isa::Avx2) return detail::avx2_table;
#else
  (void)isa;
#endif
  return detail::scalar_table;
}

const KernelTable& kernels() { return kernels(active_isa()); }

}  // namespace credence::simd
