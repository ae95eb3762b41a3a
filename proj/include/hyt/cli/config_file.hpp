#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyt/eval/rank.hpp"
#include "hyt/kv.hpp"
#include "hyt/model/config.hpp"
#include "hyt/train/config.hpp"

namespace hyt::cli {

/// Bad flag, bad config file or invalid setting; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every setting a run depends on, as one flat key space:
/// model.*, train.* and eval.* keys.
struct RunConfig {
  model::ModelConfig model;
  train::TrainConfig train;
  eval::TiePolicy ties = eval::TiePolicy::mean;
  std::uint64_t eval_threads = 1;

  KeyValues to_kv() const;
  /// Throws ConfigError on an unknown key or an unparsable value.
  void apply(const KeyValues& kv);
  /// Throws ConfigError on the first invalid setting.
  void validate() const;
};

/// Parses "key=value" overrides as given on the command line.
KeyValues parse_overrides(const std::vector<std::string>& items);

/// Names accepted by --ablate: entity-ln, entity-dropout, relation-ln.
void apply_ablation(RunConfig& cfg, const std::string& name);

/// Resolves a dataset path: used as given if it exists, otherwise looked up
/// under $HYT_DATA_ROOT when that is set. Throws ConfigError if neither exists.
std::filesystem::path resolve_data_path(const std::string& path);

}  // namespace hyt::cli
