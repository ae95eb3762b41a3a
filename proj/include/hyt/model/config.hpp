#pragma once

#include <cstdint>

#include "hyt/config.hpp"
#include "hyt/kv.hpp"

namespace hyt::inline HYT_PREC::model {

/// Network shape and regularization. Every field is recorded with each run.
struct ModelConfig {
  std::uint64_t d_embed = 200;
  std::uint64_t d_hidden = 512;
  std::uint64_t n_layers = 2;
  std::uint64_t n_heads = 4;
  std::uint64_t max_seq_len = 15;  // T
  std::uint64_t ffn_multiplier = 2;

  double attn_dropout = 0.1;
  double ent_emb_dropout = 0.3;
  double head_dropout = 0.1;
  double ln_eps = 1e-5;
  double init_std = 0.02;

  // Embedding-processing ablations; all false is the plain Transformer path.
  bool use_entity_ln = true;
  bool use_entity_dropout = true;
  bool use_relation_ln = true;
  bool use_position_embeddings = true;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;

  /// Keys are prefixed, e.g. "model.d_embed".
  KeyValues to_kv(const std::string& prefix = "model.") const;
  /// Overrides fields present in `kv`; unknown keys are ignored.
  void apply(const KeyValues& kv, const std::string& prefix = "model.");
};

}  // namespace hyt::inline HYT_PREC::model
