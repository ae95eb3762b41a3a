#include <doctest.h>

#include <stdexcept>

#include "hyt/num/ops.hpp"

using namespace hyt;
using namespace hyt::num;

TEST_CASE("construction and shape queries") {
  auto t = Tensor::from({2, 3}, {1, 2, 3, 4, 5, 6});
  CHECK(t.rows() == 2);
  CHECK(t.cols() == 3);
  CHECK(t.numel() == 6);
  CHECK_FALSE(t.requires_grad());
  CHECK_THROWS_AS(Tensor::from({2, 2}, {1, 2, 3}), std::invalid_argument);
  CHECK(Tensor::scalar(4).item() == 4);
  CHECK(Tensor::filled({3}, 2).values()[2] == 2);
}

TEST_CASE("copies alias, clone does not") {
  auto t = Tensor::zeros({2});
  auto alias = t;
  auto deep = t.clone();
  t.values()[0] = 5;
  CHECK(alias.values()[0] == 5);
  CHECK(deep.values()[0] == 0);
}

TEST_CASE("backward accumulates into leaves") {
  auto x = Tensor::from({1, 2}, {1, 2}, true);
  auto y = sum(add(x, x));
  backward(y);
  CHECK(x.grad()[0] == 2);
  backward(sum(x));
  CHECK(x.grad()[1] == 3);
  x.zero_grad();
  CHECK(x.grad()[0] == 0);
}

TEST_CASE("no-grad guard suppresses history") {
  auto x = Tensor::from({1, 2}, {1, 2}, true);
  {
    NoGradGuard guard;
    CHECK_FALSE(grad_enabled());
    CHECK_FALSE(add(x, x).requires_grad());
  }
  CHECK(grad_enabled());
  CHECK(add(x, x).requires_grad());
  CHECK_FALSE(x.detach().requires_grad());
}
