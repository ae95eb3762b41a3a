#include <doctest.h>

#include <stdexcept>
#include <string>

#include "hyt/data/synthetic.hpp"
#include "hyt/eval/evaluate.hpp"
#include "hyt/train/trainer.hpp"

using namespace hyt;
using namespace hyt::eval;

namespace {

data::KnowledgeGraph graph() {
  data::RandomGraphSpec spec;
  spec.entities = 15;
  spec.relations = 3;
  spec.statements = 30;
  spec.valid_fraction = 0.3;
  spec.seed = 8;
  return data::random_graph(spec);
}

model::HyTransformer untrained(const data::KnowledgeGraph& g) {
  model::ModelConfig m;
  m.d_embed = 8;
  m.d_hidden = 16;
  m.n_layers = 1;
  m.n_heads = 2;
  m.max_seq_len = 7;
  return model::HyTransformer(m, g.num_entities(), g.num_relations(), 1);
}

}  // namespace

TEST_CASE("ranks do not depend on thread count or batch size") {
  const auto g = graph();
  const auto m = untrained(g);
  const data::FilterIndex f(g);
  const auto q = data::build_queries(g, data::Split::valid, true);
  EvalOptions one;
  one.batch_size = 4;
  EvalOptions many;
  many.threads = 3;
  many.batch_size = 7;
  CHECK(rank_queries(m, g, q, f, one) == rank_queries(m, g, q, f, many));
}

TEST_CASE("report structure") {
  const auto g = graph();
  const auto m = untrained(g);
  const data::FilterIndex f(g);
  EvalOptions opt;
  opt.include_aux = true;
  const auto r = evaluate(m, g, data::Split::valid, f, opt);
  CHECK(r.split == "valid");
  CHECK(r.queries == 2 * g.count(data::Split::valid));
  CHECK(r.overall.mrr == doctest::Approx((r.head.mrr + r.tail.mrr) / 2));
  CHECK(r.head.count == g.count(data::Split::valid));
  std::size_t rows = 0;
  for (const auto& row : r.by_qualifiers) rows += row.head.count;
  CHECK(rows == g.count(data::Split::valid));
  if (g.total_qualifiers(data::Split::valid) > 0) {
    REQUIRE(r.aux.has_value());
    CHECK(r.aux->count == g.total_qualifiers(data::Split::valid));
  }
  CHECK(format_report(r, true).find("MRR") != std::string::npos);
  CHECK(report_json(r).find("\"mrr\"") != std::string::npos);
  CHECK_THROWS_AS(evaluate(m, g, data::Split::test, f), std::invalid_argument);
}

TEST_CASE("summarize from hand-made ranks") {
  data::KnowledgeGraph g;
  g.add("a", "r", "b", {}, data::Split::test);
  g.add("b", "r", "c", {{"q", "a"}}, data::Split::test);
  const auto q = data::build_queries(g, data::Split::test, false);
  const std::vector<double> ranks{1, 2, 4, 1};  // head, tail, head, tail
  const auto r = summarize(g, q, ranks, "test", TiePolicy::mean);
  CHECK(r.head.mrr == doctest::Approx((1 + 0.25) / 2));
  CHECK(r.tail.mrr == doctest::Approx((0.5 + 1) / 2));
  CHECK(r.overall.h1 == doctest::Approx(0.5));
  REQUIRE(r.by_qualifiers.size() == 2);
  CHECK(r.by_qualifiers[1].qualifiers == 1);
  CHECK(r.by_qualifiers[1].tail.mrr == 1);
}

TEST_CASE("a memorizing model ranks every training fact first") {
  data::KnowledgeGraph g;
  g.add("a", "born_in", "x", {}, data::Split::train);
  g.add("b", "born_in", "y", {{"year", "z"}}, data::Split::train);
  g.add("c", "lives_in", "x", {}, data::Split::train);
  model::ModelConfig m;
  m.d_embed = 16;
  m.d_hidden = 32;
  m.n_layers = 1;
  m.n_heads = 2;
  m.max_seq_len = 5;
  m.attn_dropout = m.ent_emb_dropout = m.head_dropout = 0;
  train::TrainConfig t;
  t.lr = 1e-2;
  t.epochs = 0;
  t.max_steps = 200;
  t.batch_size = 8;
  t.eval_every = 0;
  t.label_smoothing = 0;
  train::Trainer trainer(g, m, t);
  trainer.run();
  const data::FilterIndex f(g);
  const auto r = evaluate(trainer.model(), g, data::Split::train, f);
  CHECK(r.overall.mrr == 1.0);
}

TEST_CASE("vocabulary headers detect a different dataset") {
  const auto g = graph();
  const auto header = vocabulary_header(g);
  CHECK_NOTHROW(check_vocabulary(header, g));
  auto other = g;
  other.entities.intern("newcomer");
  CHECK_THROWS_AS(check_vocabulary(header, other), VocabularyMismatch);
  const auto m = untrained(g);
  const data::FilterIndex f(other);
  const auto q = data::build_queries(other, data::Split::valid, false);
  CHECK_THROWS_AS(rank_queries(m, other, q, f), VocabularyMismatch);
}
