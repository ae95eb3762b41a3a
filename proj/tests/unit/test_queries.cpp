#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include "hyt/data/queries.hpp"
#include "hyt/data/synthetic.hpp"

using namespace hyt::data;

namespace {

KnowledgeGraph small_graph() {
  KnowledgeGraph g;
  g.add("a", "r", "b", {{"q", "x"}, {"p", "y"}}, Split::train);
  g.add("a", "r", "c", {{"p", "y"}, {"q", "x"}}, Split::train);  // same context, other order
  g.add("a", "r", "b", {{"q", "z"}, {"p", "y"}}, Split::valid);
  g.add("d", "r", "b", {}, Split::test);
  return g;
}

std::vector<EntityId> ids(std::span<const EntityId> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_CASE("query counts are 2Z plus the qualifier total") {
  const auto g = small_graph();
  CHECK(build_queries(g, Split::train, true).size() == 2 * 2 + 4);
  CHECK(build_queries(g, Split::train, false).size() == 4);
  CHECK(build_queries(g, Split::test, true).size() == 2);
  const auto q = build_queries(g, Split::train, true);
  CHECK(q[0].slot == MaskedSlot::head());
  CHECK(q[1].slot == MaskedSlot::tail());
  CHECK(q[0].gold == g.entities.find("a"));
}

TEST_CASE("qualifier order does not change pattern keys") {
  const auto g = small_graph();
  CHECK(pattern_key(g.statements[0], MaskedSlot::tail()) == pattern_key(g.statements[1], MaskedSlot::tail()));
  CHECK(pattern_key(g.statements[0], MaskedSlot::head()) != pattern_key(g.statements[0], MaskedSlot::tail()));
  CHECK_THROWS_AS(entity_at(g.statements[3], MaskedSlot::qualifier(0)), std::out_of_range);
}

TEST_CASE("filter sets collect every completion of a pattern") {
  const auto g = small_graph();
  const FilterIndex index(g);
  const auto b = g.entities.find("b"), c = g.entities.find("c");
  auto tails = ids(index.answers(g.statements[0], MaskedSlot::tail()));
  CHECK(tails == std::vector<EntityId>{std::min(b, c), std::max(b, c)});

  // Masking qualifier q keeps its relation: x (train) and z (valid) complete (a, r, b, {p:y}, q:?).
  const auto qx = ids(index.answers(g.statements[0], MaskedSlot::qualifier(0)));
  CHECK(qx.size() == 2);

  const Split only_train[] = {Split::train};
  const FilterIndex train_only(g, only_train);
  CHECK(train_only.answers(g.statements[0], MaskedSlot::qualifier(0)).size() == 1);
  CHECK(train_only.answers(g.statements[3], MaskedSlot::tail()).empty());
}

TEST_CASE("duplicate statements give a deduplicated filter set") {
  KnowledgeGraph g;
  g.add("a", "r", "b", {}, Split::train);
  g.add("a", "r", "b", {}, Split::valid);
  const FilterIndex index(g);
  CHECK(index.answers(g.statements[0], MaskedSlot::tail()).size() == 1);
}

TEST_CASE("one-N labels mark every train answer and include the gold") {
  const auto g = small_graph();
  const Split only_train[] = {Split::train};
  const FilterIndex index(g, only_train);
  const auto q = build_queries(g, Split::train, true);
  const auto labels = one_n_labels(g, q, index, g.num_entities());
  CHECK(labels.rows == q.size());
  CHECK(labels.cols == static_cast<std::size_t>(g.num_entities()));
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(labels.row(i)[static_cast<std::size_t>(q[i].gold)] == 1);
    int ones = 0;
    for (auto v : labels.row(i)) ones += v;
    CHECK(static_cast<std::size_t>(ones) == index.answers(g, q[i]).size());
  }
  // A valid query whose gold is not in the train index cannot be labelled.
  const auto valid = build_queries(g, Split::valid, true);
  CHECK_THROWS_AS(one_n_labels(g, valid, index, g.num_entities()), std::logic_error);
}

TEST_CASE("random graphs honour their spec") {
  RandomGraphSpec spec;
  spec.statements = 300;
  spec.max_qualifiers = 3;
  spec.valid_fraction = 0.2;
  const auto g = random_graph(spec);
  CHECK(g.num_statements() == 300);
  CHECK(g.num_entities() == spec.entities);
  CHECK(g.num_relations() == spec.relations);
  CHECK(g.max_token_length() <= 3 + 2 * 3);
  CHECK(g.count(Split::valid) > 0);
  const auto again = random_graph(spec);
  CHECK(again.statements == g.statements);
}

TEST_CASE("functional qualifier graphs repeat train triplets in held-out splits") {
  FunctionalQualifierSpec spec;
  spec.valid_prob = 1.0;
  const auto g = functional_qualifier_graph(spec);
  const Split only_train[] = {Split::train};
  const FilterIndex index(g, only_train);
  CHECK(g.count(Split::valid) > 0);
  for (auto i : g.indices(Split::valid)) {
    const auto& s = g.statements[i];
    REQUIRE(!s.qualifiers.empty());
    bool seen = false;
    for (auto j : g.indices(Split::train)) {
      const auto& t = g.statements[j];
      if (t.head == s.head && t.relation == s.relation) {
        CHECK(t.tail == s.tail);
        CHECK(t.qualifiers[0] == s.qualifiers[0]);
        seen = true;
      }
    }
    CHECK(seen);
  }
}
