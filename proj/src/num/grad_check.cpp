#include "hyt/num/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace hyt::inline HYT_PREC::num {

double relative_error(double a, double b, double floor) noexcept {
  const double denom = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) / denom;
}

double numeric_derivative(const std::function<double(double)>& f, double h, Stencil stencil) {
  const auto diff = [&](double k) { return f(k * h) - f(-k * h); };
  switch (stencil) {
    case Stencil::central:
      return diff(1) / (2 * h);
    case Stencil::central_4th:
      return (8 * diff(1) - diff(2)) / (12 * h);
    case Stencil::central_6th:
      return (45 * diff(1) - 9 * diff(2) + diff(3)) / (60 * h);
  }
  return 0;
}

GradCheckResult grad_check(const std::function<Tensor()>& f, std::vector<Tensor> params, Real h, Stencil stencil,
                           double floor) {
  for (auto& p : params) p.zero_grad();
  {
    const Tensor loss = f();
    backward(loss);
  }
  std::vector<std::vector<Real>> analytic;
  analytic.reserve(params.size());
  for (auto& p : params) {
    auto g = p.grad();
    analytic.emplace_back(g.begin(), g.end());
  }

  NoGradGuard no_grad;

  GradCheckResult result;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    auto values = params[pi].values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      Real* x = &values[i];
      const Real x0 = *x;
      const double numeric = numeric_derivative(
          [&](double offset) {
            *x = x0 + static_cast<Real>(offset);
            const double v = static_cast<double>(f().item());
            *x = x0;
            return v;
          },
          static_cast<double>(h), stencil);
      const double a = static_cast<double>(analytic[pi][i]);
      const double err = relative_error(a, numeric, floor);
      ++result.coordinates;
      if (err > result.max_rel_error) {
        result.max_rel_error = err;
        result.worst_param = pi;
        result.worst_index = i;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace hyt::inline HYT_PREC::num
