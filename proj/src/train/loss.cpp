#include "hyt/train/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyt::inline HYT_PREC::train {

namespace {
constexpr double kClamp = 1e-7;
}

num::Tensor smoothed_bce_loss(const num::Tensor& probs, std::span<const std::uint8_t> labels, double eps) {
  if (probs.rank() != 2) throw std::invalid_argument("smoothed_bce_loss: probs must be [B, N]");
  if (labels.size() != probs.numel())
    throw std::invalid_argument("smoothed_bce_loss: " + std::to_string(labels.size()) + " labels for " +
                                std::to_string(probs.numel()) + " scores");
  if (!(eps >= 0 && eps < 1)) throw std::invalid_argument("smoothed_bce_loss: eps must be in [0, 1)");

  const auto n = probs.dim(1);
  const auto count = probs.numel();
  std::vector<Real> targets(count);
  for (std::size_t i = 0; i < count; ++i) targets[i] = static_cast<Real>(smoothed_target(labels[i] != 0, eps, n));

  double total = 0;
  const Real* p = probs.data();
  for (std::size_t i = 0; i < count; ++i) {
    const double pc = std::clamp(static_cast<double>(p[i]), kClamp, 1.0 - kClamp);
    const double y = targets[i];
    total -= y * std::log(pc) + (1 - y) * std::log(1 - pc);
  }

  auto out = num::make_result({}, {probs}, [probs, targets = std::move(targets), count](num::Node& self) {
    const double g = static_cast<double>(self.grad[0]) / static_cast<double>(count);
    Real* gp = probs.node()->grad.data();
    const Real* pv = probs.data();
    for (std::size_t i = 0; i < count; ++i) {
      const double pi = pv[i];
      if (pi < kClamp || pi > 1.0 - kClamp) continue;
      const double y = targets[i];
      gp[i] += static_cast<Real>(g * ((1 - y) / (1 - pi) - y / pi));
    }
  });
  out.data()[0] = static_cast<Real>(total / static_cast<double>(count));
  num::check_finite(out, "smoothed_bce_loss");
  return out;
}

}  // namespace hyt::inline HYT_PREC::train
