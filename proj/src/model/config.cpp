#include "hyt/model/config.hpp"

#include <stdexcept>

namespace hyt::inline HYT_PREC::model {

namespace {
void check_rate(double rate, const char* name) {
  if (!(rate >= 0 && rate < 1)) throw std::invalid_argument(std::string(name) + " must be in [0, 1)");
}
}  // namespace

void ModelConfig::validate() const {
  if (d_embed == 0 || d_hidden == 0) throw std::invalid_argument("d_embed and d_hidden must be positive");
  if (n_heads == 0 || d_hidden % n_heads != 0) throw std::invalid_argument("d_hidden must be divisible by n_heads");
  if (max_seq_len < 3) throw std::invalid_argument("max_seq_len must be at least 3");
  if (ffn_multiplier == 0) throw std::invalid_argument("ffn_multiplier must be positive");
  check_rate(attn_dropout, "attn_dropout");
  check_rate(ent_emb_dropout, "ent_emb_dropout");
  check_rate(head_dropout, "head_dropout");
  if (!(ln_eps > 0)) throw std::invalid_argument("ln_eps must be positive");
  if (!(init_std > 0)) throw std::invalid_argument("init_std must be positive");
}

KeyValues ModelConfig::to_kv(const std::string& p) const {
  return {
      {p + "d_embed", kv_str(d_embed)},
      {p + "d_hidden", kv_str(d_hidden)},
      {p + "n_layers", kv_str(n_layers)},
      {p + "n_heads", kv_str(n_heads)},
      {p + "max_seq_len", kv_str(max_seq_len)},
      {p + "ffn_multiplier", kv_str(ffn_multiplier)},
      {p + "attn_dropout", kv_str(attn_dropout)},
      {p + "ent_emb_dropout", kv_str(ent_emb_dropout)},
      {p + "head_dropout", kv_str(head_dropout)},
      {p + "ln_eps", kv_str(ln_eps)},
      {p + "init_std", kv_str(init_std)},
      {p + "use_entity_ln", kv_str(use_entity_ln)},
      {p + "use_entity_dropout", kv_str(use_entity_dropout)},
      {p + "use_relation_ln", kv_str(use_relation_ln)},
      {p + "use_position_embeddings", kv_str(use_position_embeddings)},
  };
}

void ModelConfig::apply(const KeyValues& kv, const std::string& p) {
  kv_get(kv, p + "d_embed", d_embed);
  kv_get(kv, p + "d_hidden", d_hidden);
  kv_get(kv, p + "n_layers", n_layers);
  kv_get(kv, p + "n_heads", n_heads);
  kv_get(kv, p + "max_seq_len", max_seq_len);
  kv_get(kv, p + "ffn_multiplier", ffn_multiplier);
  kv_get(kv, p + "attn_dropout", attn_dropout);
  kv_get(kv, p + "ent_emb_dropout", ent_emb_dropout);
  kv_get(kv, p + "head_dropout", head_dropout);
  kv_get(kv, p + "ln_eps", ln_eps);
  kv_get(kv, p + "init_std", init_std);
  kv_get(kv, p + "use_entity_ln", use_entity_ln);
  kv_get(kv, p + "use_entity_dropout", use_entity_dropout);
  kv_get(kv, p + "use_relation_ln", use_relation_ln);
  kv_get(kv, p + "use_position_embeddings", use_position_embeddings);
}

}  // namespace hyt::inline HYT_PREC::model
