#include "hyt/train/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "hyt/num/checkpoint.hpp"
#include "hyt/num/ops.hpp"
#include "hyt/train/loss.hpp"

namespace hyt::inline HYT_PREC::train {

namespace {

num::AdamConfig adam_config(const TrainConfig& cfg) {
  num::AdamConfig a;
  a.lr = static_cast<Real>(cfg.lr);
  a.beta1 = static_cast<Real>(cfg.adam_beta1);
  a.beta2 = static_cast<Real>(cfg.adam_beta2);
  a.eps = static_cast<Real>(cfg.adam_eps);
  return a;
}

const TrainConfig& validated(const TrainConfig& cfg) {
  cfg.validate();
  return cfg;
}

std::string slot_name(data::MaskedSlot slot) {
  switch (slot.kind) {
    case data::MaskedSlot::Kind::head: return "head";
    case data::MaskedSlot::Kind::tail: return "tail";
    case data::MaskedSlot::Kind::qualifier: return "qualifier" + std::to_string(slot.qualifier_index);
  }
  return "?";
}

class RunFiles {
 public:
  RunFiles(const std::filesystem::path& dir, bool append) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    const auto mode = append ? std::ios::app : std::ios::trunc;
    log_.open(dir / "train_log.jsonl", std::ios::out | mode);
    csv_.open(dir / "mrr_vs_time.csv", std::ios::out | mode);
    if (!log_ || !csv_) throw std::runtime_error("cannot write training logs in " + dir.string());
    if (!append) csv_ << "elapsed_s,epoch,step,mrr\n";
  }

  void record(const nlohmann::json& j) {
    if (log_.is_open()) log_ << j.dump() << '\n' << std::flush;
  }
  void point(const ValidationRecord& v) {
    if (csv_.is_open()) csv_ << v.elapsed_s << ',' << v.epoch << ',' << v.step << ',' << v.mrr << '\n' << std::flush;
  }

 private:
  std::ofstream log_;
  std::ofstream csv_;
};

}  // namespace

Trainer::Trainer(const data::KnowledgeGraph& graph, model::ModelConfig model_cfg, TrainConfig cfg)
    : graph_(graph),
      cfg_(validated(cfg)),
      model_(model_cfg, graph.num_entities(), graph.num_relations(), cfg.seed),
      set_(build_training_set(graph, cfg, model_cfg.max_seq_len)),
      optimizer_(model_.parameter_tensors(), adam_config(cfg)),
      eval_filter_(graph) {}

std::uint64_t Trainer::steps_per_epoch() const noexcept {
  return (set_.size() + cfg_.batch_size - 1) / cfg_.batch_size;
}

std::uint64_t Trainer::total_steps() const noexcept {
  const auto planned = cfg_.epochs * steps_per_epoch();
  if (cfg_.max_steps == 0) return planned;
  return cfg_.epochs == 0 ? cfg_.max_steps : std::min(planned, cfg_.max_steps);
}

const std::vector<std::size_t>& Trainer::epoch_order(std::uint64_t epoch) const {
  if (cached_epoch_ != epoch) {
    order_.resize(set_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    Rng rng(cfg_.seed, kEpochStream + epoch);
    shuffle(std::span<std::size_t>(order_), rng);
    cached_epoch_ = epoch;
  }
  return order_;
}

std::vector<std::size_t> Trainer::batch_indices(std::uint64_t step) const {
  const auto spe = steps_per_epoch();
  const auto& order = epoch_order(step / spe);
  const auto begin = static_cast<std::size_t>((step % spe) * cfg_.batch_size);
  const auto end = std::min(order.size(), begin + static_cast<std::size_t>(cfg_.batch_size));
  return {order.begin() + static_cast<std::ptrdiff_t>(begin), order.begin() + static_cast<std::ptrdiff_t>(end)};
}

num::Tensor Trainer::batch_loss(std::uint64_t step) const {
  const auto idx = batch_indices(step);
  std::vector<model::TokenSequence> seqs;
  seqs.reserve(idx.size());
  for (auto i : idx) seqs.push_back(set_.sequences[i]);
  if (cfg_.shuffle_qualifiers) {
    Rng order_rng(cfg_.seed, kOrderStream + step);
    for (auto& s : seqs) model::shuffle_qualifier_pairs(s, order_rng);
  }
  const auto labels = batch_labels(graph_, set_, idx);

  Rng rng(cfg_.seed, kStepStream + step);
  const auto emb = model_.process_embeddings(num::Mode::train, rng);
  const auto logits = model_.logits(seqs, emb, num::Mode::train, rng);
  return smoothed_bce_loss(num::sigmoid(logits), labels.values, cfg_.label_smoothing);
}

double Trainer::train_step() {
  const auto s = step();
  const auto loss = batch_loss(s);
  const double value = loss.item();
  if (!std::isfinite(value)) {
    const auto idx = batch_indices(s);
    std::ostringstream msg;
    msg << "training diverged at step " << s + 1 << " (epoch " << s / steps_per_epoch() + 1 << "): loss " << value
        << " on a batch of " << idx.size() << " queries:";
    for (std::size_t k = 0; k < std::min<std::size_t>(idx.size(), 8); ++k) {
      const auto& q = set_.queries[idx[k]];
      msg << " #" << q.statement << '/' << slot_name(q.slot);
    }
    if (idx.size() > 8) msg << " ...";
    throw DivergenceError(msg.str(), s + 1);
  }
  optimizer_.zero_grad();
  num::backward(loss);
  optimizer_.step();
  return value;
}

eval::RankReport Trainer::validate(std::size_t threads) const {
  eval::EvalOptions opt;
  opt.batch_size = cfg_.eval_batch_size;
  opt.threads = threads;
  return eval::evaluate(model_, graph_, data::Split::valid, eval_filter_, opt);
}

num::Checkpoint Trainer::checkpoint(const KeyValues& extra) const {
  auto ckpt = model_.to_checkpoint(&optimizer_);
  for (auto& [k, v] : cfg_.to_kv()) ckpt.header[k] = v;
  for (auto& [k, v] : eval::vocabulary_header(graph_)) ckpt.header[k] = v;
  for (auto& [k, v] : extra) ckpt.header[k] = v;
  ckpt.header["train.step"] = std::to_string(step());
  return ckpt;
}

void Trainer::resume(const num::Checkpoint& ckpt) {
  eval::check_vocabulary(ckpt.header, graph_);
  for (const auto& [k, v] : model_.config().to_kv()) {
    auto it = ckpt.header.find(k);
    if (it != ckpt.header.end() && it->second != v)
      throw std::runtime_error("cannot resume: checkpoint has " + k + " = " + it->second + ", config has " + v);
  }
  if (!ckpt.has_optimizer) throw std::runtime_error("cannot resume: checkpoint has no optimizer state");
  model_.load_parameters(ckpt);
  optimizer_.restore(ckpt.optimizer_step, ckpt.moments);
}

TrainResult Trainer::run(const TrainOptions& options) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const auto elapsed = [&] {
    return cfg_.log_wall_clock ? std::chrono::duration<double>(clock::now() - start).count() : 0.0;
  };
  const bool resumed = step() > 0;
  RunFiles files(options.out_dir, resumed);
  const auto save = [&](const char* name) {
    if (!options.out_dir.empty()) num::save_checkpoint(checkpoint(options.header), options.out_dir / name);
  };

  if (!resumed) {
    nlohmann::json header = {{"record", "header"},
                             {"primary_queries", set_.primary},
                             {"aux_queries", set_.auxiliary},
                             {"aux_mixing", "uniform"},
                             {"steps_per_epoch", steps_per_epoch()},
                             {"total_steps", total_steps()}};
    KeyValues settings = model_.config().to_kv();
    for (auto& [k, v] : cfg_.to_kv()) settings[k] = v;
    for (auto& [k, v] : options.header) settings[k] = v;
    header["config"] = settings;
    files.record(header);
  }

  TrainResult result;
  const bool can_validate = cfg_.eval_every > 0 && graph_.count(data::Split::valid) > 0;
  const auto spe = steps_per_epoch();
  std::uint64_t last_validated = 0;

  const auto run_validation = [&] {
    const auto report = validate(options.eval_threads);
    ValidationRecord v{(step() + spe - 1) / spe, step(), report.overall.mrr, report.overall.h1, report.overall.h10,
                       elapsed()};
    result.validations.push_back(v);
    files.record({{"record", "valid"},
                  {"epoch", v.epoch},
                  {"step", v.step},
                  {"mrr", v.mrr},
                  {"h1", v.h1},
                  {"h10", v.h10},
                  {"elapsed_s", v.elapsed_s}});
    files.point(v);
    if (options.on_validation) options.on_validation(v);
    if (!result.best || v.mrr >= result.best->mrr) {
      result.best = v;
      save("best.ckpt");
    }
    last_validated = step();
  };

  const auto total = total_steps();
  while (step() < total) {
    const double loss = train_step();
    StepRecord rec{step(), (step() - 1) / spe + 1, loss, cfg_.lr, elapsed()};
    result.steps.push_back(rec);
    files.record({{"record", "step"},
                  {"step", rec.step},
                  {"epoch", rec.epoch},
                  {"loss", rec.loss},
                  {"lr", rec.lr},
                  {"elapsed_s", rec.elapsed_s}});
    if (options.on_step) options.on_step(rec);
    if (can_validate && step() % spe == 0 && (step() / spe) % cfg_.eval_every == 0) {
      run_validation();
      save("last.ckpt");
    }
  }
  if (can_validate && last_validated != step()) run_validation();
  save("last.ckpt");
  if (!result.best && !options.out_dir.empty())
    std::filesystem::copy_file(options.out_dir / "last.ckpt", options.out_dir / "best.ckpt",
                               std::filesystem::copy_options::overwrite_existing);
  return result;
}

}  // namespace hyt::inline HYT_PREC::train
