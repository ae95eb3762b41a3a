#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyt/data/queries.hpp"
#include "hyt/eval/rank.hpp"
#include "hyt/kv.hpp"
#include "hyt/model/hy_transformer.hpp"

namespace hyt::inline HYT_PREC::eval {

struct EvalOptions {
  TiePolicy tie = TiePolicy::mean;
  std::size_t batch_size = 256;
  /// Adds a separate section for qualifier-entity queries.
  bool include_aux = false;
  /// Worker threads over query batches; results do not depend on it.
  std::size_t threads = 1;
};

struct QualifierCountRow {
  std::size_t qualifiers = 0;
  Metrics head, tail, overall;
};

/// Headline numbers are the unweighted mean of the head and tail metrics.
struct RankReport {
  std::string split;
  TiePolicy tie = TiePolicy::mean;
  Metrics overall, head, tail;
  std::vector<QualifierCountRow> by_qualifiers;  // ascending qualifier count
  std::optional<Metrics> aux;
  std::size_t queries = 0;  // main-task queries
};

/// Filtered rank of every query, in query order, scored with eval-mode
/// logits. Deterministic for any thread count.
std::vector<double> rank_queries(const model::HyTransformer& model, const data::KnowledgeGraph& graph,
                                 std::span<const data::CompletionQuery> queries, const data::FilterIndex& filter,
                                 const EvalOptions& options = {});

/// Report from ranks aligned with `queries`.
RankReport summarize(const data::KnowledgeGraph& graph, std::span<const data::CompletionQuery> queries,
                     std::span<const double> ranks, std::string split, TiePolicy tie);

/// Ranks the head and tail queries (plus qualifier queries with include_aux)
/// of `split`. Throws std::invalid_argument if the split is empty.
RankReport evaluate(const model::HyTransformer& model, const data::KnowledgeGraph& graph, data::Split split,
                    const data::FilterIndex& filter, const EvalOptions& options = {});

class VocabularyMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vocabulary sizes and fingerprints, stored in checkpoint headers.
KeyValues vocabulary_header(const data::KnowledgeGraph& graph);
/// Throws VocabularyMismatch when `header` describes different vocabularies.
/// Headers without vocabulary entries are only checked against the model sizes.
void check_vocabulary(const KeyValues& header, const data::KnowledgeGraph& graph);

/// Human-readable table; per-qualifier-count rows when `breakdown`.
std::string format_report(const RankReport& report, bool breakdown = false);
/// Single-line JSON record.
std::string report_json(const RankReport& report);

}  // namespace hyt::inline HYT_PREC::eval
