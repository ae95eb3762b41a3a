#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "hyt/data/statement.hpp"

namespace hyt::data {

/// Which entity of a statement is hidden behind [MASK].
struct MaskedSlot {
  enum class Kind : std::uint8_t { head, tail, qualifier };

  Kind kind = Kind::tail;
  std::uint32_t qualifier_index = 0;  // meaningful only for Kind::qualifier

  static constexpr MaskedSlot head() noexcept { return {Kind::head, 0}; }
  static constexpr MaskedSlot tail() noexcept { return {Kind::tail, 0}; }
  static constexpr MaskedSlot qualifier(std::uint32_t i) noexcept { return {Kind::qualifier, i}; }

  bool is_main() const noexcept { return kind != Kind::qualifier; }

  friend bool operator==(const MaskedSlot&, const MaskedSlot&) = default;
};

/// A statement with one entity masked. The filtered answer set lives in a
/// FilterIndex and is looked up by pattern.
struct CompletionQuery {
  std::size_t statement = 0;  // index into KnowledgeGraph::statements
  MaskedSlot slot;
  EntityId gold = 0;
};

/// Entity at `slot`. Throws std::out_of_range for a qualifier index >= n.
EntityId entity_at(const Statement& statement, MaskedSlot slot);

/// Head and tail queries for every statement of `split` (statement order,
/// head before tail), then, if `include_aux`, one query per qualifier pair.
/// Count = 2*Z_split + (include_aux ? sum of n : 0).
std::vector<CompletionQuery> build_queries(const KnowledgeGraph& graph, Split split, bool include_aux);

/// Canonical key of a statement with one slot wildcarded. The qualifier list
/// enters the key as a sorted multiset, so qualifier order is irrelevant; for
/// a masked qualifier the key keeps its relation and drops that one pair.
using PatternKey = std::vector<std::int32_t>;
PatternKey pattern_key(const Statement& statement, MaskedSlot slot);

struct PatternKeyHash {
  std::size_t operator()(const PatternKey& key) const noexcept;
};

/// Maps each pattern to the sorted, deduplicated set of entities completing
/// it. Read-only after construction.
class FilterIndex {
 public:
  FilterIndex() = default;

  /// Index over the statements whose split is in `splits` (all splits by default).
  explicit FilterIndex(const KnowledgeGraph& graph,
                       std::span<const Split> splits = std::span<const Split>(kAllSplits));

  /// Empty span if the pattern never occurs.
  std::span<const EntityId> answers(const PatternKey& key) const;
  std::span<const EntityId> answers(const Statement& statement, MaskedSlot slot) const {
    return answers(pattern_key(statement, slot));
  }
  std::span<const EntityId> answers(const KnowledgeGraph& graph, const CompletionQuery& q) const {
    return answers(graph.statements[q.statement], q.slot);
  }

  std::size_t num_patterns() const noexcept { return table_.size(); }

 private:
  std::unordered_map<PatternKey, std::vector<EntityId>, PatternKeyHash> table_;
};

/// Filter index over train, valid and test.
FilterIndex build_filter_index(const KnowledgeGraph& graph);

/// Dense 0/1 targets for the 1-N setting, row-major `rows x cols`.
struct LabelMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> values;

  std::span<const std::uint8_t> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
};

/// Row per query: 1 for every answer of the query's pattern in `train_index`
/// (normally a train-only FilterIndex), 0 elsewhere. Throws std::logic_error if
/// a query's gold is missing from its row.
LabelMatrix one_n_labels(const KnowledgeGraph& graph, std::span<const CompletionQuery> queries,
                         const FilterIndex& train_index, std::int32_t num_entities);

}  // namespace hyt::data
