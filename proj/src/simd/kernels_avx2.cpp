// Compiled with -mavx2 -mfma. Nothing here may run before the CPU probe in
// dispatch.cpp has confirmed support.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hyt/simd/kernels.hpp"

namespace hyt::inline HYT_PREC::simd {

namespace {

template <typename T>
struct Vec;

template <>
struct Vec<float> {
  using reg = __m256;
  static constexpr std::size_t width = 8;
  static reg load(const float* p) { return _mm256_loadu_ps(p); }
  static void store(float* p, reg v) { _mm256_storeu_ps(p, v); }
  static reg set1(float x) { return _mm256_set1_ps(x); }
  static reg zero() { return _mm256_setzero_ps(); }
  static reg add(reg a, reg b) { return _mm256_add_ps(a, b); }
  static reg sub(reg a, reg b) { return _mm256_sub_ps(a, b); }
  static reg mul(reg a, reg b) { return _mm256_mul_ps(a, b); }
  static reg fmadd(reg a, reg b, reg c) { return _mm256_fmadd_ps(a, b, c); }
  static __m256i mask(std::size_t n) {
    return _mm256_cmpgt_epi32(_mm256_set1_epi32(static_cast<int>(n)), _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7));
  }
  static reg load_n(const float* p, std::size_t n) { return _mm256_maskload_ps(p, mask(n)); }
  static void store_n(float* p, reg v, std::size_t n) { _mm256_maskstore_ps(p, mask(n), v); }
  static float hsum(reg v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    lo = _mm_add_ps(lo, hi);
    __m128 shuf = _mm_movehdup_ps(lo);
    __m128 sums = _mm_add_ps(lo, shuf);
    shuf = _mm_movehl_ps(shuf, sums);
    sums = _mm_add_ss(sums, shuf);
    return _mm_cvtss_f32(sums);
  }
};

template <>
struct Vec<double> {
  using reg = __m256d;
  static constexpr std::size_t width = 4;
  static reg load(const double* p) { return _mm256_loadu_pd(p); }
  static void store(double* p, reg v) { _mm256_storeu_pd(p, v); }
  static reg set1(double x) { return _mm256_set1_pd(x); }
  static reg zero() { return _mm256_setzero_pd(); }
  static reg add(reg a, reg b) { return _mm256_add_pd(a, b); }
  static reg sub(reg a, reg b) { return _mm256_sub_pd(a, b); }
  static reg mul(reg a, reg b) { return _mm256_mul_pd(a, b); }
  static reg fmadd(reg a, reg b, reg c) { return _mm256_fmadd_pd(a, b, c); }
  static __m256i mask(std::size_t n) {
    return _mm256_cmpgt_epi64(_mm256_set1_epi64x(static_cast<long long>(n)), _mm256_setr_epi64x(0, 1, 2, 3));
  }
  static reg load_n(const double* p, std::size_t n) { return _mm256_maskload_pd(p, mask(n)); }
  static void store_n(double* p, reg v, std::size_t n) { _mm256_maskstore_pd(p, mask(n), v); }
  static double hsum(reg v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d high64 = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, high64));
  }
};

using V = Vec<Real>;
constexpr std::size_t W = V::width;

Real dot(const Real* a, const Real* b, std::size_t n) {
  V::reg acc0 = V::zero(), acc1 = V::zero();
  std::size_t i = 0;
  for (; i + 2 * W <= n; i += 2 * W) {
    acc0 = V::fmadd(V::load(a + i), V::load(b + i), acc0);
    acc1 = V::fmadd(V::load(a + i + W), V::load(b + i + W), acc1);
  }
  for (; i + W <= n; i += W) acc0 = V::fmadd(V::load(a + i), V::load(b + i), acc0);
  Real acc = V::hsum(V::add(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

Real sum(const Real* x, std::size_t n) {
  V::reg acc = V::zero();
  std::size_t i = 0;
  for (; i + W <= n; i += W) acc = V::add(acc, V::load(x + i));
  Real total = V::hsum(acc);
  for (; i < n; ++i) total += x[i];
  return total;
}

void axpy(Real* y, Real alpha, const Real* x, std::size_t n) {
  const V::reg va = V::set1(alpha);
  std::size_t i = 0;
  for (; i + W <= n; i += W) V::store(y + i, V::fmadd(va, V::load(x + i), V::load(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(Real* y, Real alpha, std::size_t n) {
  const V::reg va = V::set1(alpha);
  std::size_t i = 0;
  for (; i + W <= n; i += W) V::store(y + i, V::mul(va, V::load(y + i)));
  for (; i < n; ++i) y[i] *= alpha;
}

void mul(Real* out, const Real* a, const Real* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + W <= n; i += W) V::store(out + i, V::mul(V::load(a + i), V::load(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_add(Real* out, const Real* a, const Real* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + W <= n; i += W) V::store(out + i, V::fmadd(V::load(a + i), V::load(b + i), V::load(out + i)));
  for (; i < n; ++i) out[i] += a[i] * b[i];
}

// R rows x up to W columns starting at column j; masked when cols < W.
template <std::size_t R>
void column_strip(const Real* const* a, Real* const* c, const Real* b, std::size_t k, std::size_t m, std::size_t j,
                  std::size_t cols, bool accumulate) {
  const bool full = cols == W;
  V::reg r[R];
  for (std::size_t i = 0; i < R; ++i)
    r[i] = !accumulate ? V::zero() : full ? V::load(c[i] + j) : V::load_n(c[i] + j, cols);
  for (std::size_t p = 0; p < k; ++p) {
    const V::reg bv = full ? V::load(b + p * m + j) : V::load_n(b + p * m + j, cols);
    for (std::size_t i = 0; i < R; ++i) r[i] = V::fmadd(V::set1(a[i][p]), bv, r[i]);
  }
  for (std::size_t i = 0; i < R; ++i) {
    if (full)
      V::store(c[i] + j, r[i]);
    else
      V::store_n(c[i] + j, r[i], cols);
  }
}

// 4 rows x 2W columns register block.
void block_4x2w(const Real* const* a, Real* const* c, const Real* b, std::size_t k, std::size_t m, std::size_t j,
                bool accumulate) {
  V::reg r[4][2];
  for (std::size_t i = 0; i < 4; ++i) {
    r[i][0] = accumulate ? V::load(c[i] + j) : V::zero();
    r[i][1] = accumulate ? V::load(c[i] + j + W) : V::zero();
  }
  for (std::size_t p = 0; p < k; ++p) {
    const V::reg b0 = V::load(b + p * m + j);
    const V::reg b1 = V::load(b + p * m + j + W);
    for (std::size_t i = 0; i < 4; ++i) {
      const V::reg s = V::set1(a[i][p]);
      r[i][0] = V::fmadd(s, b0, r[i][0]);
      r[i][1] = V::fmadd(s, b1, r[i][1]);
    }
  }
  for (std::size_t i = 0; i < 4; ++i) {
    V::store(c[i] + j, r[i][0]);
    V::store(c[i] + j + W, r[i][1]);
  }
}

// Rows are processed in chunks so that one 2W-column strip of B stays in L1
// while every row of the chunk passes over it.
void gemm_nn(const Real* a, const Real* b, Real* c, std::size_t n, std::size_t k, std::size_t m,
             bool accumulate) {
  constexpr std::size_t kChunk = 64;
  constexpr std::size_t CB = 2 * W;
  for (std::size_t i0 = 0; i0 < n; i0 += kChunk) {
    const std::size_t i1 = std::min(n, i0 + kChunk);
    std::size_t j = 0;
    for (; j + CB <= m; j += CB) {
      std::size_t i = i0;
      for (; i + 4 <= i1; i += 4) {
        const Real* ra[4] = {a + i * k, a + (i + 1) * k, a + (i + 2) * k, a + (i + 3) * k};
        Real* rc[4] = {c + i * m, c + (i + 1) * m, c + (i + 2) * m, c + (i + 3) * m};
        block_4x2w(ra, rc, b, k, m, j, accumulate);
      }
      for (; i < i1; ++i) {
        const Real* ra[1] = {a + i * k};
        Real* rc[1] = {c + i * m};
        column_strip<1>(ra, rc, b, k, m, j, W, accumulate);
        column_strip<1>(ra, rc, b, k, m, j + W, W, accumulate);
      }
    }
    for (; j < m; j += W) {
      const std::size_t cols = std::min(W, m - j);
      std::size_t i = i0;
      for (; i + 4 <= i1; i += 4) {
        const Real* ra[4] = {a + i * k, a + (i + 1) * k, a + (i + 2) * k, a + (i + 3) * k};
        Real* rc[4] = {c + i * m, c + (i + 1) * m, c + (i + 2) * m, c + (i + 3) * m};
        column_strip<4>(ra, rc, b, k, m, j, cols, accumulate);
      }
      for (; i < i1; ++i) {
        const Real* ra[1] = {a + i * k};
        Real* rc[1] = {c + i * m};
        column_strip<1>(ra, rc, b, k, m, j, cols, accumulate);
      }
    }
  }
}

// One row of A against four rows of B per pass.
void gemm_nt(const Real* a, const Real* b, Real* c, std::size_t n, std::size_t k, std::size_t m,
             bool accumulate) {
  for (std::size_t i = 0; i < n; ++i) {
    const Real* ar = a + i * k;
    Real* cr = c + i * m;
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
      const Real* b0 = b + (j + 0) * k;
      const Real* b1 = b + (j + 1) * k;
      const Real* b2 = b + (j + 2) * k;
      const Real* b3 = b + (j + 3) * k;
      V::reg s0 = V::zero(), s1 = V::zero(), s2 = V::zero(), s3 = V::zero();
      std::size_t p = 0;
      for (; p + W <= k; p += W) {
        const V::reg av = V::load(ar + p);
        s0 = V::fmadd(av, V::load(b0 + p), s0);
        s1 = V::fmadd(av, V::load(b1 + p), s1);
        s2 = V::fmadd(av, V::load(b2 + p), s2);
        s3 = V::fmadd(av, V::load(b3 + p), s3);
      }
      Real t0 = V::hsum(s0), t1 = V::hsum(s1), t2 = V::hsum(s2), t3 = V::hsum(s3);
      for (; p < k; ++p) {
        t0 += ar[p] * b0[p];
        t1 += ar[p] * b1[p];
        t2 += ar[p] * b2[p];
        t3 += ar[p] * b3[p];
      }
      if (accumulate) {
        cr[j] += t0;
        cr[j + 1] += t1;
        cr[j + 2] += t2;
        cr[j + 3] += t3;
      } else {
        cr[j] = t0;
        cr[j + 1] = t1;
        cr[j + 2] = t2;
        cr[j + 3] = t3;
      }
    }
    for (; j < m; ++j) {
      const Real v = dot(ar, b + j * k, k);
      cr[j] = accumulate ? cr[j] + v : v;
    }
  }
}

// Transpose A once, then reuse the blocked nn kernel.
void gemm_tn(const Real* a, const Real* b, Real* c, std::size_t n, std::size_t k, std::size_t m,
             bool accumulate) {
  thread_local std::vector<Real> at;
  at.resize(k * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = 0; p < k; ++p) at[p * n + i] = a[i * k + p];
  gemm_nn(at.data(), b, c, k, n, m, accumulate);
}

void normalize_rows(const Real* x, Real* xhat, Real* inv_std, std::size_t rows, std::size_t d, Real eps) {
  for (std::size_t r = 0; r < rows; ++r) {
    const Real* xr = x + r * d;
    Real* yr = xhat + r * d;
    const Real mean = sum(xr, d) / static_cast<Real>(d);
    const V::reg vm = V::set1(mean);
    V::reg acc = V::zero();
    std::size_t j = 0;
    for (; j + W <= d; j += W) {
      const V::reg diff = V::sub(V::load(xr + j), vm);
      acc = V::fmadd(diff, diff, acc);
    }
    Real var = V::hsum(acc);
    for (; j < d; ++j) var += (xr[j] - mean) * (xr[j] - mean);
    var /= static_cast<Real>(d);
    const Real inv = Real(1) / std::sqrt(var + eps);
    inv_std[r] = inv;
    const V::reg vi = V::set1(inv);
    j = 0;
    for (; j + W <= d; j += W) V::store(yr + j, V::mul(V::sub(V::load(xr + j), vm), vi));
    for (; j < d; ++j) yr[j] = (xr[j] - mean) * inv;
  }
}

}  // namespace

const Kernels& avx2_kernel_table() noexcept {
  static const Kernels table{Isa::avx2, dot,     sum,     axpy,    scale,
                             mul,       mul_add, gemm_nn, gemm_nt, gemm_tn,
                             normalize_rows};
  return table;
}

}  // namespace hyt::inline HYT_PREC::simd
