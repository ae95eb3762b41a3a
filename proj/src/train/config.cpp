#include "hyt/train/config.hpp"

#include <stdexcept>

namespace hyt::inline HYT_PREC::train {

void TrainConfig::validate() const {
  if (!(lr >= 0)) throw std::invalid_argument("lr must be non-negative");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be at least 1");
  if (eval_batch_size == 0) throw std::invalid_argument("eval_batch_size must be at least 1");
  if (!(label_smoothing >= 0 && label_smoothing < 1)) throw std::invalid_argument("label_smoothing must be in [0, 1)");
  if (epochs == 0 && max_steps == 0) throw std::invalid_argument("epochs must be positive");
  if (!(adam_beta1 >= 0 && adam_beta1 < 1) || !(adam_beta2 >= 0 && adam_beta2 < 1))
    throw std::invalid_argument("adam betas must be in [0, 1)");
  if (!(adam_eps > 0)) throw std::invalid_argument("adam_eps must be positive");
}

KeyValues TrainConfig::to_kv(const std::string& p) const {
  return {
      {p + "lr", kv_str(lr)},
      {p + "epochs", kv_str(epochs)},
      {p + "max_steps", kv_str(max_steps)},
      {p + "batch_size", kv_str(batch_size)},
      {p + "label_smoothing", kv_str(label_smoothing)},
      {p + "use_aux_task", kv_str(use_aux_task)},
      {p + "shuffle_qualifiers", kv_str(shuffle_qualifiers)},
      {p + "seed", kv_str(seed)},
      {p + "eval_every", kv_str(eval_every)},
      {p + "eval_batch_size", kv_str(eval_batch_size)},
      {p + "adam_beta1", kv_str(adam_beta1)},
      {p + "adam_beta2", kv_str(adam_beta2)},
      {p + "adam_eps", kv_str(adam_eps)},
      {p + "log_wall_clock", kv_str(log_wall_clock)},
  };
}

void TrainConfig::apply(const KeyValues& kv, const std::string& p) {
  kv_get(kv, p + "lr", lr);
  kv_get(kv, p + "epochs", epochs);
  kv_get(kv, p + "max_steps", max_steps);
  kv_get(kv, p + "batch_size", batch_size);
  kv_get(kv, p + "label_smoothing", label_smoothing);
  kv_get(kv, p + "use_aux_task", use_aux_task);
  kv_get(kv, p + "shuffle_qualifiers", shuffle_qualifiers);
  kv_get(kv, p + "seed", seed);
  kv_get(kv, p + "eval_every", eval_every);
  kv_get(kv, p + "eval_batch_size", eval_batch_size);
  kv_get(kv, p + "adam_beta1", adam_beta1);
  kv_get(kv, p + "adam_beta2", adam_beta2);
  kv_get(kv, p + "adam_eps", adam_eps);
  kv_get(kv, p + "log_wall_clock", log_wall_clock);
}

}  // namespace hyt::inline HYT_PREC::train
