#pragma once

#include <functional>
#include <vector>

#include "hyt/num/tensor.hpp"

namespace hyt::inline HYT_PREC::num {

enum class Stencil {
  central,        // (f(x+h) - f(x-h)) / 2h
  central_4th,    // five-point central difference, O(h^4)
  central_6th,    // seven-point central difference, O(h^6)
};

/// Finite-difference derivative at 0 of `f`, evaluated at offsets k*h.
double numeric_derivative(const std::function<double(double)>& f, double h, Stencil stencil);

struct GradCheckResult {
  double max_rel_error = 0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0;
  double worst_numeric = 0;
  std::size_t coordinates = 0;
};

/// |a - b| / max(|a|, |b|, floor). The floor keeps coordinates whose true
/// gradient is zero from reporting pure rounding noise as relative error.
double relative_error(double a, double b, double floor = 1e-8) noexcept;

/// Compares the reverse-mode gradient of `f` w.r.t. every coordinate of
/// `params` with finite differences. `f` must rebuild its graph on every call
/// and be deterministic. Gradients of `params` are overwritten; values are
/// restored. Points where `f` is not differentiable (ReLU kinks, clamps) are
/// the caller's responsibility to avoid.
GradCheckResult grad_check(const std::function<Tensor()>& f, std::vector<Tensor> params, Real h,
                           Stencil stencil = Stencil::central, double floor = 1e-8);

}  // namespace hyt::inline HYT_PREC::num
