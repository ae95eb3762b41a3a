#pragma once

#include <cstdint>
#include <string>

#include "hyt/config.hpp"
#include "hyt/kv.hpp"

namespace hyt::inline HYT_PREC::train {

struct TrainConfig {
  double lr = 1e-4;
  std::uint64_t epochs = 400;
  std::uint64_t max_steps = 0;  // 0: run all epochs
  std::uint64_t batch_size = 128;
  double label_smoothing = 0.1;
  bool use_aux_task = true;
  bool shuffle_qualifiers = false;  // reorder qualifier pairs in every batch
  std::uint64_t seed = 1;
  std::uint64_t eval_every = 10;  // epochs; 0 disables validation
  std::uint64_t eval_batch_size = 256;

  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  // With false, elapsed_s is logged as 0 so logs are byte-comparable.
  bool log_wall_clock = true;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;

  KeyValues to_kv(const std::string& prefix = "train.") const;
  void apply(const KeyValues& kv, const std::string& prefix = "train.");
};

}  // namespace hyt::inline HYT_PREC::train
