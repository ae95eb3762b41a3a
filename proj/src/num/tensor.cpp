#include "hyt/num/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace hyt::inline HYT_PREC::num {

namespace {
thread_local bool t_grad_enabled = true;
}

std::size_t numel(const Shape& shape) noexcept {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string to_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::span<Real> Node::ensure_grad() {
  if (grad.size() != value.size()) grad.assign(value.size(), Real(0));
  return grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return filled(std::move(shape), 0, requires_grad); }

Tensor Tensor::filled(Shape shape, Real value, bool requires_grad) {
  auto node = std::make_shared<Node>();
  node->value.assign(num::numel(shape), value);
  node->shape = std::move(shape);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::from(Shape shape, std::vector<Real> values, bool requires_grad) {
  if (values.size() != num::numel(shape))
    throw std::invalid_argument("tensor of shape " + to_string(shape) + " given " +
                                std::to_string(values.size()) + " values");
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

std::size_t Tensor::cols() const { return node_->shape.empty() ? 1 : node_->shape.back(); }

Real Tensor::item() const {
  if (numel() != 1) throw std::logic_error("item() on tensor of shape " + to_string(shape()));
  return node_->value[0];
}

void Tensor::zero_grad() {
  if (node_ && !node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), Real(0));
}

Tensor Tensor::detach() const {
  auto node = std::make_shared<Node>();
  node->shape = node_->shape;
  node->value = node_->value;
  return Tensor(std::move(node));
}

Tensor Tensor::clone() const {
  auto t = detach();
  t.node_->requires_grad = node_->requires_grad;
  return t;
}

bool grad_enabled() noexcept { return t_grad_enabled; }

NoGradGuard::NoGradGuard() noexcept : previous_(t_grad_enabled) { t_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { t_grad_enabled = previous_; }

Tensor make_result(Shape shape, std::initializer_list<Tensor> inputs, std::function<void(Node&)> backward) {
  auto node = std::make_shared<Node>();
  node->value.assign(numel(shape), Real(0));
  node->shape = std::move(shape);
  if (t_grad_enabled) {
    const bool any = std::any_of(inputs.begin(), inputs.end(),
                                 [](const Tensor& t) { return t.requires_grad(); });
    if (any) {
      node->requires_grad = true;
      for (const auto& t : inputs)
        if (t.requires_grad()) node->parents.push_back(t.node_ptr());
      node->backward = std::move(backward);
    }
  }
  return Tensor(std::move(node));
}

void backward(const Tensor& root) {
  if (!root.defined() || root.numel() != 1) throw std::logic_error("backward() needs a scalar tensor");
  if (!root.requires_grad()) return;

  // Iterative post-order DFS; reversed it is a valid topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack{{root.node(), 0}};
  visited.insert(root.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (visited.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root.node()->ensure_grad()[0] += Real(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (!node->backward) continue;
    node->ensure_grad();
    for (auto& p : node->parents) p->ensure_grad();
    node->backward(*node);
  }
}

void check_finite([[maybe_unused]] const Tensor& t, [[maybe_unused]] const char* op) {
#if defined(HYT_CHECK_FINITE)
  for (Real v : t.values())
    if (!std::isfinite(v)) throw std::runtime_error(std::string("non-finite value produced by ") + op);
#endif
}

}  // namespace hyt::inline HYT_PREC::num
