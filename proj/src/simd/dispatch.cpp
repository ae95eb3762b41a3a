#include <atomic>
#include <cstdlib>
#include <string_view>

#include "hyt/simd/kernels.hpp"

namespace hyt::inline HYT_PREC::simd {

#if defined(HYT_HAVE_AVX2)
const Kernels& avx2_kernel_table() noexcept;  // kernels_avx2.cpp
#endif

namespace {

bool cpu_has_avx2() noexcept {
#if defined(HYT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Kernels* initial_table() noexcept {
  const char* env = std::getenv("HYT_SIMD");
  const std::string_view want = env ? env : "";
  if (want == "scalar") return &scalar_kernels();
  if (const auto* fast = avx2_kernels()) return fast;
  return &scalar_kernels();
}

std::atomic<const Kernels*>& current() noexcept {
  static std::atomic<const Kernels*> table{initial_table()};
  return table;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

const Kernels* avx2_kernels() noexcept {
#if defined(HYT_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const Kernels& active() noexcept { return *current().load(std::memory_order_acquire); }

bool select(Isa isa) noexcept {
  const Kernels* table = isa == Isa::scalar ? &scalar_kernels() : avx2_kernels();
  if (!table) return false;
  current().store(table, std::memory_order_release);
  return true;
}

}  // namespace hyt::inline HYT_PREC::simd
