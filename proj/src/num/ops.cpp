#include "hyt/num/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "hyt/simd/kernels.hpp"

namespace hyt::inline HYT_PREC::num {

namespace {

const simd::Kernels& K() { return simd::active(); }

void require(bool ok, const char* op, const std::string& what) {
  if (!ok) throw std::invalid_argument(std::string(op) + ": " + what);
}

void require_matrix(const Tensor& t, const char* op) {
  require(t.defined() && t.rank() == 2, op, "expected a 2-D tensor");
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  const auto n = a.dim(0), k = a.dim(1), m = b.dim(1);
  require(b.dim(0) == k, "matmul", "inner dimensions differ: " + to_string(a.shape()) + " x " + to_string(b.shape()));
  auto out = make_result({n, m}, {a, b}, [a, b, n, k, m](Node& self) {
    if (a.requires_grad()) K().gemm_nt(self.grad.data(), b.data(), a.node()->grad.data(), n, m, k, true);
    if (b.requires_grad()) K().gemm_tn(a.data(), self.grad.data(), b.node()->grad.data(), n, k, m, true);
  });
  K().gemm_nn(a.data(), b.data(), out.data(), n, k, m, false);
  check_finite(out, "matmul");
  return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul_nt");
  require_matrix(b, "matmul_nt");
  const auto n = a.dim(0), k = a.dim(1), m = b.dim(0);
  require(b.dim(1) == k, "matmul_nt", "inner dimensions differ: " + to_string(a.shape()) + " x " + to_string(b.shape()) + "^T");
  auto out = make_result({n, m}, {a, b}, [a, b, n, k, m](Node& self) {
    if (a.requires_grad()) K().gemm_nn(self.grad.data(), b.data(), a.node()->grad.data(), n, m, k, true);
    if (b.requires_grad()) K().gemm_tn(self.grad.data(), a.data(), b.node()->grad.data(), n, m, k, true);
  });
  K().gemm_nt(a.data(), b.data(), out.data(), n, k, m, false);
  check_finite(out, "matmul_nt");
  return out;
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& bias) {
  return add_row(matmul(x, w), bias);
}

Tensor add(const Tensor& a, const Tensor& b) {
  require(a.defined() && b.defined() && a.shape() == b.shape(), "add",
          "shapes differ: " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  auto out = make_result(a.shape(), {a, b}, [a, b](Node& self) {
    if (a.requires_grad()) K().axpy(a.node()->grad.data(), 1, self.grad.data(), self.grad.size());
    if (b.requires_grad()) K().axpy(b.node()->grad.data(), 1, self.grad.data(), self.grad.size());
  });
  const auto n = out.numel();
  Real* o = out.data();
  const Real* pa = a.data();
  const Real* pb = b.data();
  for (std::size_t i = 0; i < n; ++i) o[i] = pa[i] + pb[i];
  check_finite(out, "add");
  return out;
}

Tensor add_row(const Tensor& x, const Tensor& b) {
  const auto m = x.cols();
  require(b.numel() == m, "add_row", "bias has " + std::to_string(b.numel()) + " values for " + std::to_string(m) + " columns");
  const auto rows = x.rows();
  auto out = make_result(x.shape(), {x, b}, [x, b, rows, m](Node& self) {
    if (x.requires_grad()) K().axpy(x.node()->grad.data(), 1, self.grad.data(), self.grad.size());
    if (b.requires_grad()) {
      Real* gb = b.node()->grad.data();
      for (std::size_t r = 0; r < rows; ++r) K().axpy(gb, 1, self.grad.data() + r * m, m);
    }
  });
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < m; ++j) out.data()[r * m + j] = x.data()[r * m + j] + b.data()[j];
  check_finite(out, "add_row");
  return out;
}

Tensor add_tiled(const Tensor& x, const Tensor& p) {
  require_matrix(p, "add_tiled");
  const auto m = x.cols();
  const auto period = p.dim(0);
  require(p.dim(1) == m && period > 0 && x.rows() % period == 0, "add_tiled",
          to_string(x.shape()) + " cannot tile " + to_string(p.shape()));
  const auto rows = x.rows();
  auto out = make_result(x.shape(), {x, p}, [x, p, rows, m, period](Node& self) {
    if (x.requires_grad()) K().axpy(x.node()->grad.data(), 1, self.grad.data(), self.grad.size());
    if (p.requires_grad()) {
      Real* gp = p.node()->grad.data();
      for (std::size_t r = 0; r < rows; ++r) K().axpy(gp + (r % period) * m, 1, self.grad.data() + r * m, m);
    }
  });
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < m; ++j)
      out.data()[r * m + j] = x.data()[r * m + j] + p.data()[(r % period) * m + j];
  check_finite(out, "add_tiled");
  return out;
}

Tensor scale(const Tensor& x, Real factor) {
  auto out = make_result(x.shape(), {x}, [x, factor](Node& self) {
    K().axpy(x.node()->grad.data(), factor, self.grad.data(), self.grad.size());
  });
  for (std::size_t i = 0; i < x.numel(); ++i) out.data()[i] = x.data()[i] * factor;
  check_finite(out, "scale");
  return out;
}

Tensor relu(const Tensor& x) {
  auto out = make_result(x.shape(), {x}, [x](Node& self) {
    Real* gx = x.node()->grad.data();
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      if (x.data()[i] > 0) gx[i] += self.grad[i];
  });
  for (std::size_t i = 0; i < x.numel(); ++i) out.data()[i] = std::max(x.data()[i], Real(0));
  return out;
}

Tensor gelu(const Tensor& x) {
  constexpr Real inv_sqrt2 = Real(1) / std::numbers::sqrt2_v<Real>;
  constexpr Real inv_sqrt2pi = std::numbers::inv_sqrtpi_v<Real> * inv_sqrt2;
  auto out = make_result(x.shape(), {x}, [x](Node& self) {
    Real* gx = x.node()->grad.data();
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const Real v = x.data()[i];
      const Real cdf = Real(0.5) * (Real(1) + std::erf(v * inv_sqrt2));
      const Real pdf = inv_sqrt2pi * std::exp(Real(-0.5) * v * v);
      gx[i] += self.grad[i] * (cdf + v * pdf);
    }
  });
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const Real v = x.data()[i];
    out.data()[i] = Real(0.5) * v * (Real(1) + std::erf(v * inv_sqrt2));
  }
  check_finite(out, "gelu");
  return out;
}

Tensor sigmoid(const Tensor& x) {
  auto out = make_result(x.shape(), {x}, [x](Node& self) {
    Real* gx = x.node()->grad.data();
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const Real s = self.value[i];
      gx[i] += self.grad[i] * s * (Real(1) - s);
    }
  });
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const Real v = x.data()[i];
    if (v >= 0) {
      out.data()[i] = Real(1) / (Real(1) + std::exp(-v));
    } else {
      const Real e = std::exp(v);
      out.data()[i] = e / (Real(1) + e);
    }
  }
  return out;
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, Real eps) {
  const auto d = x.cols();
  require(d > 0, "layer_norm", "last dimension is 0");
  require(eps > 0, "layer_norm", "eps must be positive");
  require(gain.numel() == d && bias.numel() == d, "layer_norm", "gain/bias size != " + std::to_string(d));
  const auto rows = x.rows();

  auto xhat = std::make_shared<std::vector<Real>>(x.numel());
  auto inv_std = std::make_shared<std::vector<Real>>(rows);
  K().normalize_rows(x.data(), xhat->data(), inv_std->data(), rows, d, eps);

  auto out = make_result(x.shape(), {x, gain, bias}, [x, gain, bias, xhat, inv_std, rows, d](Node& self) {
    const auto& kern = K();
    std::vector<Real> g(d);
    for (std::size_t r = 0; r < rows; ++r) {
      const Real* dy = self.grad.data() + r * d;
      const Real* xh = xhat->data() + r * d;
      if (gain.requires_grad()) kern.mul_add(gain.node()->grad.data(), dy, xh, d);
      if (bias.requires_grad()) kern.axpy(bias.node()->grad.data(), 1, dy, d);
      if (x.requires_grad()) {
        kern.mul(g.data(), dy, gain.data(), d);
        const Real sum_g = kern.sum(g.data(), d);
        const Real sum_gx = kern.dot(g.data(), xh, d);
        const Real inv = (*inv_std)[r];
        const Real dn = static_cast<Real>(d);
        Real* gx = x.node()->grad.data() + r * d;
        for (std::size_t j = 0; j < d; ++j) gx[j] += inv / dn * (dn * g[j] - sum_g - xh[j] * sum_gx);
      }
    }
  });
  for (std::size_t r = 0; r < rows; ++r) {
    const Real* xh = xhat->data() + r * d;
    Real* o = out.data() + r * d;
    for (std::size_t j = 0; j < d; ++j) o[j] = xh[j] * gain.data()[j] + bias.data()[j];
  }
  check_finite(out, "layer_norm");
  return out;
}

Tensor dropout(const Tensor& x, Real rate, Mode mode, Rng& rng) {
  if (!(rate >= 0 && rate < 1)) throw std::invalid_argument("dropout: rate must be in [0, 1)");
  if (mode == Mode::eval || rate == 0) return x;
  const auto threshold = static_cast<std::uint64_t>(static_cast<double>(rate) * 4294967296.0);
  const Real keep_scale = Real(1) / (Real(1) - rate);
  auto mask = std::make_shared<std::vector<Real>>(x.numel());
  for (auto& m : *mask) m = rng.next_u32() >= threshold ? keep_scale : Real(0);
  auto out = make_result(x.shape(), {x}, [x, mask](Node& self) {
    K().mul_add(x.node()->grad.data(), self.grad.data(), mask->data(), self.grad.size());
  });
  K().mul(out.data(), x.data(), mask->data(), x.numel());
  return out;
}

Tensor gather_rows(const Tensor& table, std::span<const std::int32_t> ids) {
  require_matrix(table, "gather_rows");
  const auto d = table.dim(1);
  const auto limit = static_cast<std::int32_t>(table.dim(0));
  for (auto id : ids)
    if (id < -1 || id >= limit)
      throw std::out_of_range("gather_rows: id " + std::to_string(id) + " outside table of " +
                              std::to_string(limit) + " rows");
  auto index = std::make_shared<std::vector<std::int32_t>>(ids.begin(), ids.end());
  auto out = make_result({ids.size(), d}, {table}, [table, index, d](Node& self) {
    Real* gt = table.node()->grad.data();
    for (std::size_t r = 0; r < index->size(); ++r)
      if ((*index)[r] >= 0) K().axpy(gt + static_cast<std::size_t>((*index)[r]) * d, 1, self.grad.data() + r * d, d);
  });
  for (std::size_t r = 0; r < ids.size(); ++r)
    if (ids[r] >= 0) std::copy_n(table.data() + static_cast<std::size_t>(ids[r]) * d, d, out.data() + r * d);
  return out;
}

Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end) {
  require_matrix(x, "slice_rows");
  require(begin <= end && end <= x.dim(0), "slice_rows", "range out of bounds");
  const auto d = x.dim(1);
  auto out = make_result({end - begin, d}, {x}, [x, begin, d](Node& self) {
    K().axpy(x.node()->grad.data() + begin * d, 1, self.grad.data(), self.grad.size());
  });
  std::copy_n(x.data() + begin * d, (end - begin) * d, out.data());
  return out;
}

Tensor attention(const Tensor& q, const Tensor& k, const Tensor& v, std::size_t batch, std::size_t seq,
                 std::size_t heads, std::span<const std::uint8_t> key_valid, Real dropout_rate, Mode mode,
                 Rng& rng) {
  require_matrix(q, "attention");
  const auto d = q.dim(1);
  require(k.shape() == q.shape() && v.shape() == q.shape(), "attention", "q, k, v shapes differ");
  require(q.dim(0) == batch * seq, "attention", "rows != batch * seq");
  require(heads > 0 && d % heads == 0, "attention", "width not divisible by heads");
  require(key_valid.size() == batch * seq, "attention", "key mask size != batch * seq");
  if (!(dropout_rate >= 0 && dropout_rate < 1)) throw std::invalid_argument("attention: dropout rate must be in [0, 1)");

  const auto dh = d / heads;
  const Real inv_scale = Real(1) / std::sqrt(static_cast<Real>(dh));
  const bool use_dropout = mode == Mode::train && dropout_rate > 0;
  const auto threshold = static_cast<std::uint64_t>(static_cast<double>(dropout_rate) * 4294967296.0);
  const Real keep_scale = Real(1) / (Real(1) - dropout_rate);
  const std::size_t block = seq * seq;

  // probs: softmax weights; weights: after dropout (aliases probs when off).
  auto probs = std::make_shared<std::vector<Real>>(batch * heads * block, Real(0));
  auto weights = use_dropout ? std::make_shared<std::vector<Real>>(probs->size(), Real(0)) : probs;
  auto valid = std::make_shared<std::vector<std::uint8_t>>(key_valid.begin(), key_valid.end());

  const auto& kern = K();
  const Real neg_inf = -std::numeric_limits<Real>::infinity();
  std::vector<Real> scores(seq);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t h = 0; h < heads; ++h) {
      Real* P = probs->data() + (b * heads + h) * block;
      for (std::size_t i = 0; i < seq; ++i) {
        const Real* qi = q.data() + (b * seq + i) * d + h * dh;
        Real best = neg_inf;
        for (std::size_t j = 0; j < seq; ++j) {
          if (!(*valid)[b * seq + j]) {
            scores[j] = neg_inf;
            continue;
          }
          scores[j] = kern.dot(qi, k.data() + (b * seq + j) * d + h * dh, dh) * inv_scale;
          best = std::max(best, scores[j]);
        }
        if (best == neg_inf) continue;  // no valid key: row stays zero
        Real total = 0;
        for (std::size_t j = 0; j < seq; ++j) {
          const Real e = scores[j] == neg_inf ? Real(0) : std::exp(scores[j] - best);
          P[i * seq + j] = e;
          total += e;
        }
        for (std::size_t j = 0; j < seq; ++j) P[i * seq + j] /= total;
      }
      if (use_dropout) {
        Real* Wt = weights->data() + (b * heads + h) * block;
        for (std::size_t e = 0; e < block; ++e) Wt[e] = rng.next_u32() >= threshold ? P[e] * keep_scale : Real(0);
      }
    }
  }

  auto out = make_result({batch * seq, d}, {q, k, v},
                         [q, k, v, probs, weights, batch, seq, heads, d, dh, inv_scale, use_dropout, keep_scale](Node& self) {
    const auto& kern = K();
    const std::size_t block = seq * seq;
    std::vector<Real> dW(seq), dS(seq);
    Real* gq = q.requires_grad() ? q.node()->grad.data() : nullptr;
    Real* gk = k.requires_grad() ? k.node()->grad.data() : nullptr;
    Real* gv = v.requires_grad() ? v.node()->grad.data() : nullptr;
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t h = 0; h < heads; ++h) {
        const Real* P = probs->data() + (b * heads + h) * block;
        const Real* Wt = weights->data() + (b * heads + h) * block;
        for (std::size_t i = 0; i < seq; ++i) {
          const Real* go = self.grad.data() + (b * seq + i) * d + h * dh;
          for (std::size_t j = 0; j < seq; ++j) {
            const Real w = Wt[i * seq + j];
            dW[j] = kern.dot(go, v.data() + (b * seq + j) * d + h * dh, dh);
            if (gv && w != 0) kern.axpy(gv + (b * seq + j) * d + h * dh, w, go, dh);
          }
          // Through dropout, then softmax.
          Real inner = 0;
          for (std::size_t j = 0; j < seq; ++j) {
            Real dp = dW[j];
            if (use_dropout) dp = Wt[i * seq + j] == 0 ? Real(0) : dp * keep_scale;
            dS[j] = dp;
            inner += P[i * seq + j] * dp;
          }
          const Real* qi = q.data() + (b * seq + i) * d + h * dh;
          for (std::size_t j = 0; j < seq; ++j) {
            const Real p = P[i * seq + j];
            if (p == 0) continue;
            const Real ds = p * (dS[j] - inner) * inv_scale;
            if (gq) kern.axpy(gq + (b * seq + i) * d + h * dh, ds, k.data() + (b * seq + j) * d + h * dh, dh);
            if (gk) kern.axpy(gk + (b * seq + j) * d + h * dh, ds, qi, dh);
          }
        }
      }
    }
  });

  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t h = 0; h < heads; ++h) {
      const Real* Wt = weights->data() + (b * heads + h) * block;
      for (std::size_t i = 0; i < seq; ++i) {
        Real* oi = out.data() + (b * seq + i) * d + h * dh;
        for (std::size_t j = 0; j < seq; ++j) {
          const Real w = Wt[i * seq + j];
          if (w != 0) kern.axpy(oi, w, v.data() + (b * seq + j) * d + h * dh, dh);
        }
      }
    }
  check_finite(out, "attention");
  return out;
}

Tensor sum(const Tensor& x) {
  auto out = make_result({}, {x}, [x](Node& self) {
    const Real g = self.grad[0];
    for (auto& gx : x.node()->grad) gx += g;
  });
  out.data()[0] = K().sum(x.data(), x.numel());
  return out;
}

Tensor mean(const Tensor& x) {
  require(x.numel() > 0, "mean", "empty tensor");
  return scale(sum(x), Real(1) / static_cast<Real>(x.numel()));
}

}  // namespace hyt::inline HYT_PREC::num
