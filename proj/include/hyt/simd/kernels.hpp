#pragma once

#include <cstddef>
#include <string_view>

#include "hyt/config.hpp"

// Dense inner loops used by the tensor ops and the cost benchmark.
//
// Every kernel has a scalar reference version and, on x86-64, an AVX2+FMA
// version compiled in a separate translation unit. One table is selected per
// process at first use (CPU probe, overridable with HYT_SIMD=scalar|avx2);
// results are then deterministic for the life of the process. All matrices
// are row-major and contiguous.

namespace hyt::inline HYT_PREC::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

struct Kernels {
  Isa isa;

  Real (*dot)(const Real* a, const Real* b, std::size_t n);
  Real (*sum)(const Real* x, std::size_t n);
  /// y += alpha * x
  void (*axpy)(Real* y, Real alpha, const Real* x, std::size_t n);
  /// y *= alpha
  void (*scale)(Real* y, Real alpha, std::size_t n);
  /// out = a * b (elementwise)
  void (*mul)(Real* out, const Real* a, const Real* b, std::size_t n);
  /// out += a * b (elementwise)
  void (*mul_add)(Real* out, const Real* a, const Real* b, std::size_t n);

  /// C[n,m] (+)= A[n,k] * B[k,m]
  void (*gemm_nn)(const Real* a, const Real* b, Real* c, std::size_t n, std::size_t k, std::size_t m,
                  bool accumulate);
  /// C[n,m] (+)= A[n,k] * B[m,k]^T
  void (*gemm_nt)(const Real* a, const Real* b, Real* c, std::size_t n, std::size_t k, std::size_t m,
                  bool accumulate);
  /// C[k,m] (+)= A[n,k]^T * B[n,m]
  void (*gemm_tn)(const Real* a, const Real* b, Real* c, std::size_t n, std::size_t k, std::size_t m,
                  bool accumulate);

  /// Per row of x[rows,d]: xhat = (x - mean) * inv_std, inv_std = 1/sqrt(var + eps),
  /// with the biased (1/d) variance.
  void (*normalize_rows)(const Real* x, Real* xhat, Real* inv_std, std::size_t rows, std::size_t d,
                         Real eps);
};

const Kernels& scalar_kernels() noexcept;
/// nullptr when not compiled in or the CPU lacks AVX2/FMA.
const Kernels* avx2_kernels() noexcept;

/// The process-wide table.
const Kernels& active() noexcept;
/// Overrides the process-wide table (tests, benchmarks). Returns false if `isa`
/// is unavailable, leaving the selection unchanged. Not thread-safe against
/// concurrent kernel use.
bool select(Isa isa) noexcept;

}  // namespace hyt::inline HYT_PREC::simd
