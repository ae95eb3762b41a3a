#pragma once

#include <cstdint>
#include <span>

#include "hyt/num/tensor.hpp"

namespace hyt::inline HYT_PREC::train {

/// Target for a 0/1 label under smoothing eps over n classes: y(1 - eps) + eps/n.
inline double smoothed_target(bool positive, double eps, std::size_t n) noexcept {
  return (positive ? 1.0 - eps : 0.0) + eps / static_cast<double>(n);
}

/// Mean over all entries of -[y' log p + (1 - y') log(1 - p)], with y' the
/// smoothed targets and p clamped to [1e-7, 1 - 1e-7]. `probs` is [B, N] and
/// `labels` holds B*N zeros and ones. Clamped entries pass no gradient.
num::Tensor smoothed_bce_loss(const num::Tensor& probs, std::span<const std::uint8_t> labels, double eps);

}  // namespace hyt::inline HYT_PREC::train
