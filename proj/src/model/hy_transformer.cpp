#include "hyt/model/hy_transformer.hpp"

#include <cmath>
#include <stdexcept>

namespace hyt::inline HYT_PREC::model {

namespace {

Tensor normal_tensor(num::Shape shape, Rng& rng, double std_dev) {
  std::vector<Real> values(num::numel(shape));
  for (auto& v : values) v = static_cast<Real>(rng.normal() * std_dev);
  return Tensor::from(std::move(shape), std::move(values), true);
}

}  // namespace

HyTransformer::HyTransformer(ModelConfig cfg, std::int32_t num_entities, std::int32_t num_relations,
                             std::uint64_t seed)
    : cfg_(cfg), num_entities_(num_entities), num_relations_(num_relations) {
  cfg_.validate();
  if (num_entities < 1 || num_relations < 1) throw std::invalid_argument("model needs at least one entity and relation");

  const auto de = cfg_.d_embed, dh = cfg_.d_hidden, ff = cfg_.d_hidden * cfg_.ffn_multiplier;
  const double sd = cfg_.init_std;
  Rng rng(seed, 0x1417);

  entity_table_ = add_param("entity_embedding", {static_cast<std::size_t>(num_entities) + 1, de}, rng, sd);
  relation_table_ = add_param("relation_embedding", {static_cast<std::size_t>(num_relations), de}, rng, sd);
  entity_ln_gain_ = add_constant_param("entity_ln.gain", {de}, 1);
  entity_ln_bias_ = add_constant_param("entity_ln.bias", {de}, 0);
  relation_ln_gain_ = add_constant_param("relation_ln.gain", {de}, 1);
  relation_ln_bias_ = add_constant_param("relation_ln.bias", {de}, 0);

  w_in_ = add_weight("input.weight", {de, dh}, rng);
  b_in_ = add_constant_param("input.bias", {dh}, 0);
  positions_ = add_param("position_embedding", {cfg_.max_seq_len, dh}, rng, sd);

  for (std::uint64_t l = 0; l < cfg_.n_layers; ++l) {
    const std::string p = "layer" + std::to_string(l) + ".";
    Layer L;
    L.ln1_gain = add_constant_param(p + "ln1.gain", {dh}, 1);
    L.ln1_bias = add_constant_param(p + "ln1.bias", {dh}, 0);
    L.wq = add_weight(p + "attn.wq", {dh, dh}, rng);
    L.bq = add_constant_param(p + "attn.bq", {dh}, 0);
    L.wk = add_weight(p + "attn.wk", {dh, dh}, rng);
    L.bk = add_constant_param(p + "attn.bk", {dh}, 0);
    L.wv = add_weight(p + "attn.wv", {dh, dh}, rng);
    L.bv = add_constant_param(p + "attn.bv", {dh}, 0);
    L.wo = add_weight(p + "attn.wo", {dh, dh}, rng);
    L.bo = add_constant_param(p + "attn.bo", {dh}, 0);
    L.ln2_gain = add_constant_param(p + "ln2.gain", {dh}, 1);
    L.ln2_bias = add_constant_param(p + "ln2.bias", {dh}, 0);
    L.w1 = add_weight(p + "ffn.w1", {dh, ff}, rng);
    L.b1 = add_constant_param(p + "ffn.b1", {ff}, 0);
    L.w2 = add_weight(p + "ffn.w2", {ff, dh}, rng);
    L.b2 = add_constant_param(p + "ffn.b2", {dh}, 0);
    layers_.push_back(std::move(L));
  }
  final_ln_gain_ = add_constant_param("final_ln.gain", {dh}, 1);
  final_ln_bias_ = add_constant_param("final_ln.bias", {dh}, 0);

  wf1_ = add_weight("head.w1", {dh, dh}, rng);
  bf1_ = add_constant_param("head.b1", {dh}, 0);
  wf2_ = add_param("head.w2", {dh, de}, rng, sd);
  bf2_ = add_constant_param("head.b2", {de}, 0);
}

Tensor& HyTransformer::add_param(const std::string& name, num::Shape shape, Rng& rng, double std_dev) {
  params_.push_back({name, normal_tensor(std::move(shape), rng, std_dev)});
  return params_.back().tensor;
}

Tensor& HyTransformer::add_weight(const std::string& name, num::Shape shape, Rng& rng) {
  const double fan_in = static_cast<double>(shape.at(0));
  return add_param(name, std::move(shape), rng, 1.0 / std::sqrt(fan_in));
}

Tensor& HyTransformer::add_constant_param(const std::string& name, num::Shape shape, Real value) {
  params_.push_back({name, Tensor::filled(std::move(shape), value, true)});
  return params_.back().tensor;
}

ProcessedEmbeddings process_embeddings(const EmbeddingTables& t, const ModelConfig& cfg, Mode mode, Rng& rng) {
  const auto eps = static_cast<Real>(cfg.ln_eps);
  Tensor entities = t.entities;
  if (cfg.use_entity_ln) entities = num::layer_norm(entities, t.entity_ln_gain, t.entity_ln_bias, eps);
  if (cfg.use_entity_dropout) entities = num::dropout(entities, static_cast<Real>(cfg.ent_emb_dropout), mode, rng);
  Tensor relations = t.relations;
  if (cfg.use_relation_ln) relations = num::layer_norm(relations, t.relation_ln_gain, t.relation_ln_bias, eps);
  return {std::move(entities), std::move(relations)};
}

EmbeddingTables HyTransformer::embedding_tables() const {
  return {entity_table_, relation_table_, entity_ln_gain_, entity_ln_bias_, relation_ln_gain_, relation_ln_bias_};
}

Tensor HyTransformer::encode(std::span<const TokenSequence> batch, const ProcessedEmbeddings& emb, Mode mode,
                             Rng& rng) const {
  const std::size_t T = cfg_.max_seq_len;
  const std::size_t B = batch.size();
  std::vector<std::int32_t> ent_ids(B * T, -1), rel_ids(B * T, -1);
  std::vector<std::uint8_t> valid(B * T, 0);
  for (std::size_t b = 0; b < B; ++b) {
    const auto& seq = batch[b];
    if (seq.length() != T)
      throw std::invalid_argument("sequence length " + std::to_string(seq.length()) + " != model T " + std::to_string(T));
    for (std::size_t t = 0; t < T; ++t) {
      const auto& tok = seq.tokens[t];
      const auto i = b * T + t;
      switch (tok.kind) {
        case TokenKind::entity:
          if (tok.id < 0 || tok.id >= num_entities_) throw std::out_of_range("entity id " + std::to_string(tok.id) + " not in vocabulary");
          ent_ids[i] = tok.id;
          valid[i] = 1;
          break;
        case TokenKind::relation:
          if (tok.id < 0 || tok.id >= num_relations_) throw std::out_of_range("relation id " + std::to_string(tok.id) + " not in vocabulary");
          rel_ids[i] = tok.id;
          valid[i] = 1;
          break;
        case TokenKind::mask:
          ent_ids[i] = mask_row();
          valid[i] = 1;
          break;
        case TokenKind::pad:
          break;
      }
    }
  }

  const auto eps = static_cast<Real>(cfg_.ln_eps);
  const auto attn_rate = static_cast<Real>(cfg_.attn_dropout);

  Tensor x = num::add(num::gather_rows(emb.entities, ent_ids), num::gather_rows(emb.relations, rel_ids));
  Tensor h = num::linear(x, w_in_, b_in_);
  if (cfg_.use_position_embeddings) h = num::add_tiled(h, positions_);

  for (const auto& L : layers_) {
    Tensor a = num::layer_norm(h, L.ln1_gain, L.ln1_bias, eps);
    Tensor q = num::linear(a, L.wq, L.bq);
    Tensor k = num::linear(a, L.wk, L.bk);
    Tensor v = num::linear(a, L.wv, L.bv);
    Tensor att = num::attention(q, k, v, B, T, cfg_.n_heads, valid, attn_rate, mode, rng);
    Tensor o = num::dropout(num::linear(att, L.wo, L.bo), attn_rate, mode, rng);
    h = num::add(h, o);

    Tensor a2 = num::layer_norm(h, L.ln2_gain, L.ln2_bias, eps);
    Tensor f = num::gelu(num::linear(a2, L.w1, L.b1));
    f = num::dropout(num::linear(f, L.w2, L.b2), attn_rate, mode, rng);
    h = num::add(h, f);
  }
  return num::layer_norm(h, final_ln_gain_, final_ln_bias_, eps);
}

Tensor HyTransformer::project_mask(const Tensor& encoded, std::span<const TokenSequence> batch, Mode mode,
                                   Rng& rng) const {
  const std::size_t T = cfg_.max_seq_len;
  std::vector<std::int32_t> rows(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    if (batch[b].mask_index >= T) throw std::invalid_argument("mask index outside the sequence");
    rows[b] = static_cast<std::int32_t>(b * T + batch[b].mask_index);
  }
  Tensor m = num::gather_rows(encoded, rows);
  Tensor hidden = num::gelu(num::linear(m, wf1_, bf1_));
  hidden = num::dropout(hidden, static_cast<Real>(cfg_.head_dropout), mode, rng);
  return num::linear(hidden, wf2_, bf2_);
}

Tensor entity_logits(const Tensor& projected, const Tensor& processed_entities, std::int32_t num_entities) {
  Tensor candidates = num::slice_rows(processed_entities, 0, static_cast<std::size_t>(num_entities));
  return num::matmul_nt(projected, candidates);
}

Tensor HyTransformer::logits(std::span<const TokenSequence> batch, const ProcessedEmbeddings& emb, Mode mode,
                             Rng& rng) const {
  Tensor encoded = encode(batch, emb, mode, rng);
  Tensor z = project_mask(encoded, batch, mode, rng);
  return entity_logits(z, emb.entities, num_entities_);
}

Tensor HyTransformer::forward(std::span<const TokenSequence> batch, Mode mode, Rng& rng) const {
  const auto emb = process_embeddings(mode, rng);
  return logits(batch, emb, mode, rng);
}

std::vector<Tensor> HyTransformer::parameter_tensors() const {
  std::vector<Tensor> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.tensor);
  return out;
}

std::size_t HyTransformer::parameter_count() const noexcept {
  std::size_t total = 0;
  for (const auto& p : params_) total += p.tensor.numel();
  return total;
}

const Tensor& HyTransformer::parameter(const std::string& name) const {
  for (const auto& p : params_)
    if (p.name == name) return p.tensor;
  throw std::out_of_range("no parameter named '" + name + "'");
}

num::Checkpoint HyTransformer::to_checkpoint(const num::Adam* optimizer) const {
  num::Checkpoint ckpt;
  ckpt.header = cfg_.to_kv();
  ckpt.header["model.num_entities"] = std::to_string(num_entities_);
  ckpt.header["model.num_relations"] = std::to_string(num_relations_);
  for (const auto& p : params_) {
    const auto v = p.tensor.values();
    ckpt.tensors.push_back({p.name, p.tensor.shape(), std::vector<Real>(v.begin(), v.end())});
  }
  if (optimizer) {
    ckpt.has_optimizer = true;
    ckpt.optimizer_step = optimizer->steps();
    ckpt.moments = optimizer->moments();
  }
  return ckpt;
}

HyTransformer HyTransformer::from_checkpoint(const num::Checkpoint& ckpt) {
  ModelConfig cfg;
  cfg.apply(ckpt.header);
  const auto n = std::stoi(ckpt.at("model.num_entities"));
  const auto m = std::stoi(ckpt.at("model.num_relations"));
  HyTransformer model(cfg, n, m, 0);
  model.load_parameters(ckpt);
  return model;
}

void HyTransformer::load_parameters(const num::Checkpoint& ckpt) {
  for (auto& p : params_) {
    const auto* stored = ckpt.find(p.name);
    if (!stored) throw std::runtime_error("checkpoint lacks parameter '" + p.name + "'");
    if (stored->shape != p.tensor.shape())
      throw std::runtime_error("parameter '" + p.name + "' has shape " + num::to_string(stored->shape) +
                               " in the checkpoint but " + num::to_string(p.tensor.shape()) + " in the model");
    std::copy(stored->values.begin(), stored->values.end(), p.tensor.values().begin());
  }
}

}  // namespace hyt::inline HYT_PREC::model
