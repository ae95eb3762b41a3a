#include "hyt/num/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hyt::inline HYT_PREC::num {

void adam_update(std::span<Real> param, std::span<const Real> grad, AdamMoments& mom, std::uint64_t step,
                 const AdamConfig& cfg) {
  const auto n = param.size();
  if (grad.size() != n || mom.m.size() != n || mom.v.size() != n)
    throw std::invalid_argument("adam_update: size mismatch (param " + std::to_string(n) + ", grad " +
                                std::to_string(grad.size()) + ")");
  if (step == 0) throw std::invalid_argument("adam_update: step is 1-based");
  const auto t = static_cast<double>(step);
  const Real bc1 = Real(1) / static_cast<Real>(1.0 - std::pow(static_cast<double>(cfg.beta1), t));
  const Real bc2 = Real(1) / static_cast<Real>(1.0 - std::pow(static_cast<double>(cfg.beta2), t));
  for (std::size_t i = 0; i < n; ++i) {
    const Real g = grad[i];
    mom.m[i] = cfg.beta1 * mom.m[i] + (Real(1) - cfg.beta1) * g;
    mom.v[i] = cfg.beta2 * mom.v[i] + (Real(1) - cfg.beta2) * g * g;
    const Real m_hat = mom.m[i] * bc1;
    const Real v_hat = mom.v[i] * bc2;
    param[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

Adam::Adam(std::vector<Tensor> params, AdamConfig cfg) : params_(std::move(params)), cfg_(cfg) {
  moments_.reserve(params_.size());
  for (const auto& p : params_) moments_.push_back({std::vector<Real>(p.numel()), std::vector<Real>(p.numel())});
}

void Adam::step() {
  ++step_;
  std::vector<Real> zeros;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_[i];
    std::span<const Real> g;
    if (p.has_grad()) {
      g = p.grad();
    } else {
      zeros.assign(p.numel(), Real(0));
      g = zeros;
    }
    adam_update(p.values(), g, moments_[i], step_, cfg_);
  }
}

void Adam::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

void Adam::restore(std::uint64_t step, std::vector<AdamMoments> moments) {
  if (moments.size() != params_.size()) throw std::invalid_argument("Adam::restore: parameter count mismatch");
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (moments[i].m.size() != params_[i].numel() || moments[i].v.size() != params_[i].numel())
      throw std::invalid_argument("Adam::restore: moment shape mismatch at parameter " + std::to_string(i));
  moments_ = std::move(moments);
  step_ = step;
}

}  // namespace hyt::inline HYT_PREC::num
