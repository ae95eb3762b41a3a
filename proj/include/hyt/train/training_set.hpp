#pragma once

#include <span>
#include <vector>

#include "hyt/data/queries.hpp"
#include "hyt/model/tokens.hpp"
#include "hyt/train/config.hpp"

namespace hyt::inline HYT_PREC::train {

/// Training queries with their flattened sequences. Label rows are built per
/// batch from `train_index`, which covers the train split only.
struct TrainingSet {
  std::vector<data::CompletionQuery> queries;
  std::vector<model::TokenSequence> sequences;  // parallel to queries
  data::FilterIndex train_index;
  std::size_t primary = 0;  // head + tail queries
  std::size_t auxiliary = 0;

  std::size_t size() const noexcept { return queries.size(); }
};

/// Head and tail queries for every train statement plus, with use_aux_task,
/// one query per qualifier pair; auxiliary queries are mixed into the same
/// pool. Throws std::invalid_argument on an empty train split and
/// model::SequenceTooLong if a statement does not fit in `seq_len`.
TrainingSet build_training_set(const data::KnowledgeGraph& graph, const TrainConfig& cfg, std::size_t seq_len);

/// 1-N label rows for the queries at `indices`.
data::LabelMatrix batch_labels(const data::KnowledgeGraph& graph, const TrainingSet& set,
                               std::span<const std::size_t> indices);

}  // namespace hyt::inline HYT_PREC::train
