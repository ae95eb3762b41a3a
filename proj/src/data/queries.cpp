#include "hyt/data/queries.hpp"

#include <algorithm>
#include <stdexcept>

#include <boost/container_hash/hash.hpp>

namespace hyt::data {

EntityId entity_at(const Statement& s, MaskedSlot slot) {
  switch (slot.kind) {
    case MaskedSlot::Kind::head: return s.head;
    case MaskedSlot::Kind::tail: return s.tail;
    case MaskedSlot::Kind::qualifier: return s.qualifiers.at(slot.qualifier_index).entity;
  }
  return -1;
}

std::vector<CompletionQuery> build_queries(const KnowledgeGraph& graph, Split split, bool include_aux) {
  std::vector<CompletionQuery> out;
  const auto idx = graph.indices(split);
  out.reserve(2 * idx.size());
  for (auto i : idx) {
    const auto& s = graph.statements[i];
    out.push_back({i, MaskedSlot::head(), s.head});
    out.push_back({i, MaskedSlot::tail(), s.tail});
  }
  if (include_aux) {
    for (auto i : idx) {
      const auto& s = graph.statements[i];
      for (std::uint32_t q = 0; q < s.qualifiers.size(); ++q)
        out.push_back({i, MaskedSlot::qualifier(q), s.qualifiers[q].entity});
    }
  }
  return out;
}

PatternKey pattern_key(const Statement& s, MaskedSlot slot) {
  std::vector<Qualifier> rest = s.qualifiers;
  std::int32_t masked_relation = -1;
  if (slot.kind == MaskedSlot::Kind::qualifier) {
    if (slot.qualifier_index >= rest.size()) throw std::out_of_range("qualifier slot out of range");
    masked_relation = rest[slot.qualifier_index].relation;
    rest.erase(rest.begin() + slot.qualifier_index);
  }
  std::sort(rest.begin(), rest.end());

  PatternKey key;
  key.reserve(5 + 2 * rest.size());
  key.push_back(static_cast<std::int32_t>(slot.kind));
  key.push_back(slot.kind == MaskedSlot::Kind::head ? -1 : s.head);
  key.push_back(s.relation);
  key.push_back(slot.kind == MaskedSlot::Kind::tail ? -1 : s.tail);
  key.push_back(masked_relation);
  for (const auto& q : rest) {
    key.push_back(q.relation);
    key.push_back(q.entity);
  }
  return key;
}

std::size_t PatternKeyHash::operator()(const PatternKey& key) const noexcept {
  return boost::hash_range(key.begin(), key.end());
}

FilterIndex::FilterIndex(const KnowledgeGraph& graph, std::span<const Split> splits) {
  for (std::size_t i = 0; i < graph.statements.size(); ++i) {
    if (std::find(splits.begin(), splits.end(), graph.splits[i]) == splits.end()) continue;
    const auto& s = graph.statements[i];
    table_[pattern_key(s, MaskedSlot::head())].push_back(s.head);
    table_[pattern_key(s, MaskedSlot::tail())].push_back(s.tail);
    for (std::uint32_t q = 0; q < s.qualifiers.size(); ++q)
      table_[pattern_key(s, MaskedSlot::qualifier(q))].push_back(s.qualifiers[q].entity);
  }
  for (auto& [key, answers] : table_) {
    std::sort(answers.begin(), answers.end());
    answers.erase(std::unique(answers.begin(), answers.end()), answers.end());
  }
}

std::span<const EntityId> FilterIndex::answers(const PatternKey& key) const {
  auto it = table_.find(key);
  if (it == table_.end()) return {};
  return it->second;
}

FilterIndex build_filter_index(const KnowledgeGraph& graph) { return FilterIndex(graph); }

LabelMatrix one_n_labels(const KnowledgeGraph& graph, std::span<const CompletionQuery> queries,
                         const FilterIndex& train_index, std::int32_t num_entities) {
  LabelMatrix labels;
  labels.rows = queries.size();
  labels.cols = static_cast<std::size_t>(num_entities);
  labels.values.assign(labels.rows * labels.cols, 0);
  for (std::size_t r = 0; r < queries.size(); ++r) {
    auto* row = labels.values.data() + r * labels.cols;
    for (EntityId e : train_index.answers(graph, queries[r])) row[e] = 1;
    const auto gold = queries[r].gold;
    if (gold < 0 || gold >= num_entities || row[gold] != 1)
      throw std::logic_error("label row without its gold entity (query " + std::to_string(r) + ")");
  }
  return labels;
}

}  // namespace hyt::data
