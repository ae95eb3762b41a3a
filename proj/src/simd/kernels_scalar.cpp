#include <cmath>

#include "hyt/simd/kernels.hpp"

namespace hyt::inline HYT_PREC::simd {

namespace {

Real dot(const Real* a, const Real* b, std::size_t n) {
  Real acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

Real sum(const Real* x, std::size_t n) {
  Real acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

void axpy(Real* y, Real alpha, const Real* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(Real* y, Real alpha, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] *= alpha;
}

void mul(Real* out, const Real* a, const Real* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_add(Real* out, const Real* a, const Real* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] += a[i] * b[i];
}

void gemm_nn(const Real* a, const Real* b, Real* c, std::size_t n, std::size_t k, std::size_t m,
             bool accumulate) {
  for (std::size_t i = 0; i < n; ++i) {
    Real* crow = c + i * m;
    if (!accumulate)
      for (std::size_t j = 0; j < m; ++j) crow[j] = 0;
    for (std::size_t p = 0; p < k; ++p) {
      const Real aip = a[i * k + p];
      const Real* brow = b + p * m;
      for (std::size_t j = 0; j < m; ++j) crow[j] += aip * brow[j];
    }
  }
}

void gemm_nt(const Real* a, const Real* b, Real* c, std::size_t n, std::size_t k, std::size_t m,
             bool accumulate) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const Real v = dot(a + i * k, b + j * k, k);
      c[i * m + j] = accumulate ? c[i * m + j] + v : v;
    }
  }
}

void gemm_tn(const Real* a, const Real* b, Real* c, std::size_t n, std::size_t k, std::size_t m,
             bool accumulate) {
  if (!accumulate)
    for (std::size_t i = 0; i < k * m; ++i) c[i] = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Real* arow = a + i * k;
    const Real* brow = b + i * m;
    for (std::size_t p = 0; p < k; ++p) axpy(c + p * m, arow[p], brow, m);
  }
}

void normalize_rows(const Real* x, Real* xhat, Real* inv_std, std::size_t rows, std::size_t d, Real eps) {
  for (std::size_t r = 0; r < rows; ++r) {
    const Real* xr = x + r * d;
    Real* yr = xhat + r * d;
    const Real mean = sum(xr, d) / static_cast<Real>(d);
    Real var = 0;
    for (std::size_t j = 0; j < d; ++j) var += (xr[j] - mean) * (xr[j] - mean);
    var /= static_cast<Real>(d);
    const Real inv = Real(1) / std::sqrt(var + eps);
    inv_std[r] = inv;
    for (std::size_t j = 0; j < d; ++j) yr[j] = (xr[j] - mean) * inv;
  }
}

}  // namespace

const Kernels& scalar_kernels() noexcept {
  static const Kernels table{Isa::scalar, dot,     sum,     axpy,    scale,
                             mul,         mul_add, gemm_nn, gemm_nt, gemm_tn,
                             normalize_rows};
  return table;
}

}  // namespace hyt::inline HYT_PREC::simd
