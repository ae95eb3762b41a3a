#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hyt/num/tensor.hpp"

namespace hyt::inline HYT_PREC::num {

struct AdamConfig {
  Real lr = Real(1e-4);
  Real beta1 = Real(0.9);
  Real beta2 = Real(0.999);
  Real eps = Real(1e-8);
};

/// First and second moment accumulators for one parameter.
struct AdamMoments {
  std::vector<Real> m;
  std::vector<Real> v;
};

/// One bias-corrected Adam update of `param` at 1-based step `step`.
/// Throws std::invalid_argument when the sizes of param, grad and moments differ.
void adam_update(std::span<Real> param, std::span<const Real> grad, AdamMoments& moments,
                 std::uint64_t step, const AdamConfig& cfg);

class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamConfig cfg);

  /// Applies one update from the parameters' current gradients. Parameters
  /// without a gradient buffer are treated as having zero gradient.
  void step();
  void zero_grad();

  std::uint64_t steps() const noexcept { return step_; }
  const AdamConfig& config() const noexcept { return cfg_; }
  void set_lr(Real lr) noexcept { cfg_.lr = lr; }

  const std::vector<AdamMoments>& moments() const noexcept { return moments_; }
  /// Restores optimizer state (from a checkpoint). Sizes must match the parameters.
  void restore(std::uint64_t step, std::vector<AdamMoments> moments);

 private:
  std::vector<Tensor> params_;
  AdamConfig cfg_;
  std::vector<AdamMoments> moments_;
  std::uint64_t step_ = 0;
};

}  // namespace hyt::inline HYT_PREC::num
