#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hyt/data/statement.hpp"
#include "hyt/eval/evaluate.hpp"
#include "hyt/model/hy_transformer.hpp"
#include "hyt/num/adam.hpp"
#include "hyt/train/config.hpp"
#include "hyt/train/training_set.hpp"

namespace hyt::inline HYT_PREC::train {

struct StepRecord {
  std::uint64_t step = 0;   // 1-based count of optimizer updates
  std::uint64_t epoch = 0;  // 1-based
  double loss = 0;
  double lr = 0;
  double elapsed_s = 0;
};

struct ValidationRecord {
  std::uint64_t epoch = 0;
  std::uint64_t step = 0;
  double mrr = 0, h1 = 0, h10 = 0;
  double elapsed_s = 0;
};

/// Non-finite training loss. The message names the step and the batch.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::uint64_t step) : std::runtime_error(what), step_(step) {}
  std::uint64_t step() const noexcept { return step_; }

 private:
  std::uint64_t step_;
};

struct TrainOptions {
  /// Receives train_log.jsonl, mrr_vs_time.csv, best.ckpt and last.ckpt.
  /// Empty: nothing is written.
  std::filesystem::path out_dir;
  std::function<void(const StepRecord&)> on_step;
  std::function<void(const ValidationRecord&)> on_validation;
  /// Extra entries for the log header and checkpoint headers.
  KeyValues header;
  std::size_t eval_threads = 1;
};

struct TrainResult {
  std::vector<StepRecord> steps;
  std::vector<ValidationRecord> validations;
  std::optional<ValidationRecord> best;
};

/// 1-N trainer with Adam.
///
/// Every random draw is keyed by the seed and the global step: the epoch
/// permutation uses stream (kEpochStream + epoch) and a step's dropout masks
/// use stream (kStepStream + step), qualifier reordering (kOrderStream + step).
/// Resuming from a checkpoint therefore
/// continues the exact trajectory of an uninterrupted run.
class Trainer {
 public:
  static constexpr std::uint64_t kEpochStream = 1ull << 32;
  static constexpr std::uint64_t kStepStream = 2ull << 32;
  static constexpr std::uint64_t kOrderStream = 3ull << 32;

  /// Throws std::invalid_argument for a bad config or an empty train split.
  Trainer(const data::KnowledgeGraph& graph, model::ModelConfig model_cfg, TrainConfig cfg);

  model::HyTransformer& model() noexcept { return model_; }
  const model::HyTransformer& model() const noexcept { return model_; }
  const TrainConfig& config() const noexcept { return cfg_; }
  const TrainingSet& training_set() const noexcept { return set_; }

  std::uint64_t steps_per_epoch() const noexcept;
  /// Planned number of updates: epochs * steps_per_epoch, capped by max_steps.
  std::uint64_t total_steps() const noexcept;
  /// Updates done so far.
  std::uint64_t step() const noexcept { return optimizer_.steps(); }

  /// Query indices of the batch for 0-based global step `step`.
  std::vector<std::size_t> batch_indices(std::uint64_t step) const;
  /// Loss of the batch for 0-based global step `step` with train-mode dropout.
  /// Builds the graph; gradients land in the parameters after backward.
  num::Tensor batch_loss(std::uint64_t step) const;

  /// One update on the next batch. Returns the loss; throws DivergenceError
  /// if it is not finite (parameters are left untouched).
  double train_step();

  /// Trains from the current step to total_steps(), validating every
  /// eval_every epochs (and once at the end) when the valid split is non-empty.
  TrainResult run(const TrainOptions& options = {});

  eval::RankReport validate(std::size_t threads = 1) const;

  /// Parameters, optimizer state and a header with both configs, the
  /// vocabulary fingerprints and the step.
  num::Checkpoint checkpoint(const KeyValues& extra = {}) const;
  /// Restores parameters, optimizer state and step. Throws std::runtime_error
  /// if the model config differs and eval::VocabularyMismatch for other data.
  void resume(const num::Checkpoint& ckpt);

 private:
  const std::vector<std::size_t>& epoch_order(std::uint64_t epoch) const;

  const data::KnowledgeGraph& graph_;
  TrainConfig cfg_;
  model::HyTransformer model_;
  TrainingSet set_;
  num::Adam optimizer_;
  data::FilterIndex eval_filter_;

  mutable std::uint64_t cached_epoch_ = ~0ull;
  mutable std::vector<std::size_t> order_;
};

}  // namespace hyt::inline HYT_PREC::train
