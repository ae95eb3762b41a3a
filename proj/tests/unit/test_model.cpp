#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hyt/model/hy_transformer.hpp"
#include "hyt/num/grad_check.hpp"
#include "toy_problem.hpp"

using namespace hyt;
using namespace hyt::model;
using data::MaskedSlot;

namespace {

ModelConfig tiny() {
  ModelConfig c;
  c.d_embed = 8;
  c.d_hidden = 16;
  c.n_layers = 2;
  c.n_heads = 2;
  c.max_seq_len = 7;
  return c;
}

std::vector<Real> row(const num::Tensor& t, std::size_t r) {
  const auto v = t.values();
  return {v.begin() + static_cast<std::ptrdiff_t>(r * t.cols()), v.begin() + static_cast<std::ptrdiff_t>((r + 1) * t.cols())};
}

}  // namespace

TEST_CASE("logits have one column per entity") {
  HyTransformer m(tiny(), 12, 3, 1);
  const std::vector<TokenSequence> batch{flatten({0, 1, 2, {}}, MaskedSlot::tail(), 7),
                                         flatten({3, 0, 4, {{2, 5}}}, MaskedSlot::qualifier(0), 7)};
  Rng rng(1);
  const auto logits = m.forward(batch, Mode::eval, rng);
  CHECK(logits.dim(0) == 2);
  CHECK(logits.dim(1) == 12);
  CHECK(m.parameter("entity_embedding").dim(0) == 13);
  CHECK(m.mask_row() == 12);
  for (auto v : logits.values()) CHECK(std::isfinite(v));
}

TEST_CASE("eval-mode scores of a query do not depend on the rest of the batch") {
  HyTransformer m(tiny(), 12, 3, 2);
  const auto a = flatten({0, 1, 2, {}}, MaskedSlot::head(), 7);
  const auto b = flatten({5, 2, 6, {{1, 7}, {0, 8}}}, MaskedSlot::tail(), 7);
  Rng r1(1), r2(1);
  const std::vector<TokenSequence> alone{a}, mixed{b, a};
  const auto x = m.forward(alone, Mode::eval, r1);
  const auto y = m.forward(mixed, Mode::eval, r2);
  const auto rx = row(x, 0), ry = row(y, 1);
  for (std::size_t i = 0; i < rx.size(); ++i) CHECK(rx[i] == doctest::Approx(ry[i]).epsilon(1e-5));
}

TEST_CASE("train mode is stochastic, eval mode is not") {
  auto cfg = tiny();
  cfg.ent_emb_dropout = 0.5;
  HyTransformer m(cfg, 12, 3, 3);
  const std::vector<TokenSequence> batch{flatten({0, 1, 2, {}}, MaskedSlot::tail(), 7)};
  Rng a(1), b(2), c(1), d(2);
  CHECK(row(m.forward(batch, Mode::train, a), 0) != row(m.forward(batch, Mode::train, b), 0));
  CHECK(row(m.forward(batch, Mode::eval, c), 0) == row(m.forward(batch, Mode::eval, d), 0));
}

TEST_CASE("embedding processing honours the ablation switches") {
  HyTransformer full(tiny(), 12, 3, 4);
  Rng rng(1);
  const auto e = full.process_embeddings(Mode::eval, rng);
  for (std::size_t r = 0; r < 13; ++r) {
    double mean = 0;
    for (auto v : row(e.entities, r)) mean += v;
    CHECK(std::abs(mean / 8) < 1e-5);
  }
  auto cfg = tiny();
  cfg.use_entity_ln = false;
  cfg.use_relation_ln = false;
  cfg.use_entity_dropout = false;
  HyTransformer plain(cfg, 12, 3, 4);
  const auto p = plain.process_embeddings(Mode::train, rng);
  const auto raw = plain.parameter("entity_embedding").values();
  CHECK(std::vector<Real>(p.entities.values().begin(), p.entities.values().end()) ==
        std::vector<Real>(raw.begin(), raw.end()));
}

TEST_CASE("input validation") {
  HyTransformer m(tiny(), 12, 3, 5);
  Rng rng(1);
  const std::vector<TokenSequence> short_seq{flatten({0, 1, 2, {}}, MaskedSlot::tail(), 5)};
  CHECK_THROWS_AS(m.forward(short_seq, Mode::eval, rng), std::invalid_argument);
  const std::vector<TokenSequence> unknown{flatten({0, 1, 40, {}}, MaskedSlot::head(), 7)};
  CHECK_THROWS_AS(m.forward(unknown, Mode::eval, rng), std::out_of_range);
  auto bad = tiny();
  bad.n_heads = 3;
  CHECK_THROWS_AS(HyTransformer(bad, 12, 3, 1), std::invalid_argument);
}

TEST_CASE("checkpoint restores an identical scorer") {
  HyTransformer m(tiny(), 12, 3, 6);
  const auto copy = HyTransformer::from_checkpoint(m.to_checkpoint());
  CHECK(copy.parameter_count() == m.parameter_count());
  const std::vector<TokenSequence> batch{flatten({3, 0, 4, {{2, 5}}}, MaskedSlot::qualifier(0), 7)};
  Rng a(1), b(1);
  CHECK(row(m.forward(batch, Mode::eval, a), 0) == row(copy.forward(batch, Mode::eval, b), 0));
  HyTransformer other(tiny(), 11, 3, 6);
  CHECK_THROWS(other.load_parameters(m.to_checkpoint()));
}

TEST_CASE("toy problem gradients in single precision") {
  auto p = toy::make_toy_problem(5);
  const auto r = num::grad_check([&] { return toy::toy_loss(p); }, p.model.parameter_tensors(), Real(1e-2),
                                 num::Stencil::central_4th, 1e-3);
  INFO("worst " << p.model.parameters()[r.worst_param].name << "[" << r.worst_index << "] " << r.worst_analytic
                << " vs " << r.worst_numeric);
  CHECK(r.max_rel_error < 5e-2);
}
