#include "hyt/data/synthetic.hpp"

#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "hyt/rng.hpp"

namespace hyt::data {

namespace {

void intern_range(Vocabulary& vocab, const char* prefix, std::int32_t count) {
  for (std::int32_t i = 0; i < count; ++i) vocab.intern(prefix + std::to_string(i));
}

Split draw_split(Rng& rng, double valid, double test) {
  const double u = rng.uniform();
  if (u < valid) return Split::valid;
  if (u < valid + test) return Split::test;
  return Split::train;
}

}  // namespace

KnowledgeGraph random_graph(const RandomGraphSpec& spec) {
  KnowledgeGraph g;
  intern_range(g.entities, "e", spec.entities);
  intern_range(g.relations, "r", spec.relations);
  Rng rng(spec.seed, 0x5eed);
  auto entity = [&] { return static_cast<EntityId>(rng.below(static_cast<std::uint64_t>(spec.entities))); };
  auto relation = [&] { return static_cast<RelationId>(rng.below(static_cast<std::uint64_t>(spec.relations))); };

  g.statements.reserve(spec.statements);
  g.splits.reserve(spec.statements);
  for (std::size_t i = 0; i < spec.statements; ++i) {
    Statement s{entity(), relation(), entity(), {}};
    if (spec.max_qualifiers > 0 && rng.uniform() < spec.qualifier_fraction) {
      const auto n = 1 + rng.below(spec.max_qualifiers);
      for (std::uint64_t q = 0; q < n; ++q) s.qualifiers.push_back({relation(), entity()});
    }
    g.add(std::move(s), draw_split(rng, spec.valid_fraction, spec.test_fraction));
  }
  return g;
}

KnowledgeGraph functional_qualifier_graph(const FunctionalQualifierSpec& spec) {
  KnowledgeGraph g;
  const auto n = spec.entities;
  const auto m = spec.main_relations;
  intern_range(g.entities, "e", n);
  intern_range(g.relations, "r", m);
  for (RelationId r = 0; r < m; ++r) g.relations.intern("q" + std::to_string(r));
  const RelationId noise_rel = g.relations.intern("noise");

  Rng rng(spec.seed, 0xf00d);
  std::vector<std::vector<EntityId>> tail_of(m), value_of(m);
  for (RelationId r = 0; r < m; ++r) {
    tail_of[r].resize(n);
    std::iota(tail_of[r].begin(), tail_of[r].end(), 0);
    shuffle(std::span<EntityId>(tail_of[r]), rng);
    value_of[r].resize(n);
    for (auto& v : value_of[r]) v = static_cast<EntityId>(rng.below(static_cast<std::uint64_t>(n)));
  }

  const auto max_pairs = static_cast<std::size_t>(n) * static_cast<std::size_t>(m);
  const auto pairs = std::min(spec.pairs, max_pairs);
  std::set<std::pair<EntityId, RelationId>> seen;
  while (seen.size() < pairs) {
    const auto h = static_cast<EntityId>(rng.below(static_cast<std::uint64_t>(n)));
    const auto r = static_cast<RelationId>(rng.below(static_cast<std::uint64_t>(m)));
    if (!seen.insert({h, r}).second) continue;
    for (std::uint32_t c = 0; c < spec.copies; ++c) {
      Statement s{h, r, tail_of[r][h], {{m + r, value_of[r][h]}}};
      if (rng.uniform() < spec.noise_qualifier_prob)
        s.qualifiers.push_back({noise_rel, static_cast<EntityId>(rng.below(static_cast<std::uint64_t>(n)))});
      const Split split = c == 0 ? Split::train : draw_split(rng, spec.valid_prob, spec.test_prob);
      g.add(std::move(s), split);
    }
  }
  return g;
}

}  // namespace hyt::data
