#pragma once

#include <cstdint>
#include <span>

#include "hyt/num/tensor.hpp"
#include "hyt/rng.hpp"

// Differentiable ops over 2-D row-major tensors ([rows, cols]); "row" ops
// treat any tensor as rows() x cols(). Shape errors throw std::invalid_argument.

namespace hyt::inline HYT_PREC::num {

enum class Mode { train, eval };

/// [n,k] x [k,m] -> [n,m]
Tensor matmul(const Tensor& a, const Tensor& b);
/// [n,k] x [m,k]^T -> [n,m]
Tensor matmul_nt(const Tensor& a, const Tensor& b);
/// x[n,k] * w[k,m] + bias[m]
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& bias);

Tensor add(const Tensor& a, const Tensor& b);
/// x[n,m] + b[m] on every row.
Tensor add_row(const Tensor& x, const Tensor& b);
/// x[B*T, m] + p[T, m]: row i gets p[i % T].
Tensor add_tiled(const Tensor& x, const Tensor& p);
Tensor scale(const Tensor& x, Real factor);

Tensor relu(const Tensor& x);
/// Exact (erf) GELU.
Tensor gelu(const Tensor& x);
Tensor sigmoid(const Tensor& x);

/// Row-wise layer normalization with affine gain/bias, biased variance.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, Real eps = Real(1e-5));

/// Inverted dropout. Eval mode or rate 0 returns `x` itself. Element i is
/// kept iff the i-th 32-bit draw of `rng` is >= rate * 2^32, so a given
/// stream yields the same mask in every precision. Throws for rate outside [0,1).
Tensor dropout(const Tensor& x, Real rate, Mode mode, Rng& rng);

/// Rows of `table` picked by `ids`; id -1 yields a zero row that receives no
/// gradient. Out-of-range ids throw std::out_of_range.
Tensor gather_rows(const Tensor& table, std::span<const std::int32_t> ids);
/// Rows [begin, end) of x.
Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end);

/// Multi-head scaled dot-product self-attention core (no projections).
///
/// q, k, v are [batch*seq, d] with d divisible by heads. key_valid has
/// batch*seq entries; keys with 0 get zero weight. Dropout is applied to the
/// attention weights. Returns [batch*seq, d].
Tensor attention(const Tensor& q, const Tensor& k, const Tensor& v, std::size_t batch, std::size_t seq,
                 std::size_t heads, std::span<const std::uint8_t> key_valid, Real dropout_rate, Mode mode,
                 Rng& rng);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);

}  // namespace hyt::inline HYT_PREC::num
