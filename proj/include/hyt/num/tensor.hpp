#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hyt/config.hpp"

namespace hyt::inline HYT_PREC::num {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape) noexcept;
std::string to_string(const Shape& shape);

/// Graph node behind a Tensor handle. Op implementations fill `parents` and
/// `backward`; `backward` reads this node's grad and accumulates into the
/// parents' grads.
struct Node {
  Shape shape;
  std::vector<Real> value;
  std::vector<Real> grad;  // empty until needed
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  std::span<Real> ensure_grad();
};

/// Shared handle to a dense row-major tensor.
///
/// Copies alias the same storage. Leaf tensors created with requires_grad
/// are parameters; ops on them build a graph that `backward` walks once and
/// that is released with the last handle to the result.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor filled(Shape shape, Real value, bool requires_grad = false);
  /// Throws std::invalid_argument if values.size() != numel(shape).
  static Tensor from(Shape shape, std::vector<Real> values, bool requires_grad = false);
  static Tensor scalar(Real value, bool requires_grad = false) { return from({}, {value}, requires_grad); }

  bool defined() const noexcept { return node_ != nullptr; }
  explicit operator bool() const noexcept { return defined(); }

  const Shape& shape() const { return node_->shape; }
  std::size_t dim(std::size_t i) const { return node_->shape.at(i); }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t numel() const { return node_->value.size(); }
  /// Last dimension; 1 for a scalar.
  std::size_t cols() const;
  /// Product of all but the last dimension.
  std::size_t rows() const { return cols() == 0 ? 0 : numel() / cols(); }

  std::span<Real> values() { return node_->value; }
  std::span<const Real> values() const { return node_->value; }
  Real* data() { return node_->value.data(); }
  const Real* data() const { return node_->value.data(); }
  Real item() const;

  bool requires_grad() const noexcept { return node_ && node_->requires_grad; }
  /// Gradient buffer, allocated zero-filled on first access.
  std::span<Real> grad() { return node_->ensure_grad(); }
  std::span<const Real> grad() const { return node_->ensure_grad(); }
  bool has_grad() const noexcept { return node_ && !node_->grad.empty(); }
  void zero_grad();

  /// Same values, no graph history, requires_grad = false.
  Tensor detach() const;
  /// Deep copy of the values (and grad flag), no history.
  Tensor clone() const;

  Node* node() const noexcept { return node_.get(); }
  const std::shared_ptr<Node>& node_ptr() const noexcept { return node_; }
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<Node> node_;
};

/// Whether ops record graph history on this thread.
bool grad_enabled() noexcept;

/// Disables graph recording on this thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard() noexcept;
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

/// Creates an op output. History is attached only if grad recording is on and
/// some input requires grad; in that case `backward` is stored and the result
/// requires grad.
Tensor make_result(Shape shape, std::initializer_list<Tensor> inputs,
                   std::function<void(Node&)> backward);

/// Reverse-mode sweep from a scalar tensor (seed 1). Gradients accumulate
/// into every reachable tensor that requires grad.
void backward(const Tensor& root);

/// Throws std::runtime_error naming `op` if any value is NaN/Inf. Compiled to
/// nothing unless HYT_CHECK_FINITE is defined.
void check_finite(const Tensor& t, const char* op);

}  // namespace hyt::inline HYT_PREC::num
