#include "hyt/train/training_set.hpp"

#include <stdexcept>

namespace hyt::inline HYT_PREC::train {

TrainingSet build_training_set(const data::KnowledgeGraph& graph, const TrainConfig& cfg, std::size_t seq_len) {
  if (graph.count(data::Split::train) == 0) throw std::invalid_argument("the train split is empty");
  TrainingSet set;
  set.queries = data::build_queries(graph, data::Split::train, cfg.use_aux_task);
  set.sequences.reserve(set.queries.size());
  for (const auto& q : set.queries) {
    set.sequences.push_back(model::flatten(graph.statements[q.statement], q.slot, seq_len,
                                           "#" + std::to_string(q.statement)));
    if (q.slot.is_main()) ++set.primary;
    else ++set.auxiliary;
  }
  const data::Split train_only[] = {data::Split::train};
  set.train_index = data::FilterIndex(graph, train_only);
  return set;
}

data::LabelMatrix batch_labels(const data::KnowledgeGraph& graph, const TrainingSet& set,
                               std::span<const std::size_t> indices) {
  std::vector<data::CompletionQuery> batch;
  batch.reserve(indices.size());
  for (auto i : indices) batch.push_back(set.queries.at(i));
  return data::one_n_labels(graph, batch, set.train_index, graph.num_entities());
}

}  // namespace hyt::inline HYT_PREC::train
