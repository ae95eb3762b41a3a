#pragma once

#include <cstdint>

#include "hyt/data/statement.hpp"

namespace hyt::data {

/// Uniformly random statements. All `entities` and `relations` names (e0.., r0..)
/// are interned up front so the vocabulary sizes are exact.
struct RandomGraphSpec {
  std::int32_t entities = 50;
  std::int32_t relations = 5;
  std::size_t statements = 200;
  double qualifier_fraction = 0.5;  // share of statements with >= 1 qualifier
  std::uint32_t max_qualifiers = 2;
  double valid_fraction = 0.0;
  double test_fraction = 0.0;
  std::uint64_t seed = 1;
};

KnowledgeGraph random_graph(const RandomGraphSpec& spec);

/// Statements whose tail and qualifier entity are deterministic functions of
/// (head, relation):
///
///   (h, r, perm_r(h), {(qualifier_rel_r, value_r(h)), (noise_rel, random)?})
///
/// Each sampled (h, r) pair is emitted `copies` times with independently drawn
/// noise qualifiers. The first copy always goes to train; later copies are
/// assigned to valid/test with the given probabilities, so held-out statements
/// repeat a training triplet in an unseen qualifier context.
struct FunctionalQualifierSpec {
  std::int32_t entities = 40;
  std::int32_t main_relations = 4;
  std::size_t pairs = 120;
  std::uint32_t copies = 2;
  double noise_qualifier_prob = 0.5;
  double valid_prob = 0.25;
  double test_prob = 0.0;
  std::uint64_t seed = 7;
};

KnowledgeGraph functional_qualifier_graph(const FunctionalQualifierSpec& spec);

}  // namespace hyt::data
