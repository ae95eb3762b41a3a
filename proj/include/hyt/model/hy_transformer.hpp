#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hyt/model/config.hpp"
#include "hyt/model/tokens.hpp"
#include "hyt/num/adam.hpp"
#include "hyt/num/checkpoint.hpp"
#include "hyt/num/ops.hpp"
#include "hyt/rng.hpp"

namespace hyt::inline HYT_PREC::model {

using num::Mode;
using num::Tensor;

struct NamedParameter {
  std::string name;
  Tensor tensor;
};

/// Learnable embedding tables and their layer-norm affines.
struct EmbeddingTables {
  Tensor entities;   // (N+1) x d_embed, last row is [MASK]
  Tensor relations;  // M x d_embed
  Tensor entity_ln_gain, entity_ln_bias;
  Tensor relation_ln_gain, relation_ln_bias;
};

/// Entity and relation tables after embedding processing.
struct ProcessedEmbeddings {
  Tensor entities;
  Tensor relations;
};

/// E^ = Dropout(LN(E)), R^ = LN(R), row-wise over the full tables; each
/// transform can be switched off through the config. O((N + M) d), with no
/// dependence on the number of statements.
ProcessedEmbeddings process_embeddings(const EmbeddingTables& tables, const ModelConfig& cfg, Mode mode, Rng& rng);

/// Mask-position Transformer scorer over hyper-relational statements.
///
/// Forward pass for a batch of flattened statements:
///   E^ = Dropout(LN(E)), R^ = LN(R)          (each step switchable)
///   S  = rows of E^ / R^ picked by token      (pad rows are zero)
///   H  = S W_in + b_in + P                    (P: learned positions)
///   H  = L pre-norm encoder layers, final LN
///   z  = f(H[mask])                           (GELU MLP, d_hidden -> d_embed)
///   logits = z E^[0:N]^T
/// Pad positions are excluded as attention keys, so they never affect real
/// positions.
class HyTransformer {
 public:
  HyTransformer(ModelConfig cfg, std::int32_t num_entities, std::int32_t num_relations, std::uint64_t seed);

  const ModelConfig& config() const noexcept { return cfg_; }
  std::int32_t num_entities() const noexcept { return num_entities_; }
  std::int32_t num_relations() const noexcept { return num_relations_; }
  std::int32_t mask_row() const noexcept { return num_entities_; }

  EmbeddingTables embedding_tables() const;
  ProcessedEmbeddings process_embeddings(Mode mode, Rng& rng) const {
    return model::process_embeddings(embedding_tables(), cfg_, mode, rng);
  }

  /// Encoder output, [batch * T, d_hidden]. Throws std::invalid_argument for a
  /// sequence of the wrong length and std::out_of_range for unknown ids.
  Tensor encode(std::span<const TokenSequence> batch, const ProcessedEmbeddings& emb, Mode mode, Rng& rng) const;

  /// Mask-row projection z = f(H[mask]), [batch, d_embed].
  Tensor project_mask(const Tensor& encoded, std::span<const TokenSequence> batch, Mode mode, Rng& rng) const;

  /// Pre-sigmoid scores, [batch, N]; the [MASK] row is never scored.
  Tensor logits(std::span<const TokenSequence> batch, const ProcessedEmbeddings& emb, Mode mode, Rng& rng) const;
  /// process_embeddings + logits.
  Tensor forward(std::span<const TokenSequence> batch, Mode mode, Rng& rng) const;

  std::vector<NamedParameter>& parameters() noexcept { return params_; }
  const std::vector<NamedParameter>& parameters() const noexcept { return params_; }
  std::vector<Tensor> parameter_tensors() const;
  std::size_t parameter_count() const noexcept;
  const Tensor& parameter(const std::string& name) const;

  /// Parameters plus model config and vocabulary sizes in the header;
  /// optimizer state when `optimizer` is given.
  num::Checkpoint to_checkpoint(const num::Adam* optimizer = nullptr) const;
  /// Rebuilds a model from a checkpoint written by to_checkpoint.
  static HyTransformer from_checkpoint(const num::Checkpoint& ckpt);
  /// Copies parameter values in; throws std::runtime_error on a missing tensor
  /// or a shape mismatch.
  void load_parameters(const num::Checkpoint& ckpt);

 private:
  struct Layer {
    Tensor ln1_gain, ln1_bias;
    Tensor wq, bq, wk, bk, wv, bv, wo, bo;
    Tensor ln2_gain, ln2_bias;
    Tensor w1, b1, w2, b2;
  };

  Tensor& add_param(const std::string& name, num::Shape shape, Rng& rng, double std_dev);
  /// Projection matrix [fan_in, fan_out], N(0, 1/fan_in).
  Tensor& add_weight(const std::string& name, num::Shape shape, Rng& rng);
  Tensor& add_constant_param(const std::string& name, num::Shape shape, Real value);

  ModelConfig cfg_;
  std::int32_t num_entities_;
  std::int32_t num_relations_;
  std::vector<NamedParameter> params_;

  Tensor entity_table_, relation_table_;
  Tensor entity_ln_gain_, entity_ln_bias_, relation_ln_gain_, relation_ln_bias_;
  Tensor w_in_, b_in_, positions_;
  std::vector<Layer> layers_;
  Tensor final_ln_gain_, final_ln_bias_;
  Tensor wf1_, bf1_, wf2_, bf2_;
};

/// Dot products of projected mask rows z [B, d] against the first N rows of
/// the processed entity table: [B, N].
Tensor entity_logits(const Tensor& projected, const Tensor& processed_entities, std::int32_t num_entities);

}  // namespace hyt::inline HYT_PREC::model
