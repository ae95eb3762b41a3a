#include "hyt/cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "hyt/bench/cost_bench.hpp"
#include "hyt/cli/config_file.hpp"
#include "hyt/cli/manifest.hpp"
#include "hyt/data/io.hpp"
#include "hyt/data/queries.hpp"
#include "hyt/data/synthetic.hpp"
#include "hyt/eval/evaluate.hpp"
#include "hyt/model/hy_transformer.hpp"
#include "hyt/num/checkpoint.hpp"
#include "hyt/simd/kernels.hpp"
#include "hyt/train/trainer.hpp"

namespace hyt::cli {

namespace {

namespace fs = std::filesystem;

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct TrainFlags {
  std::string data;
  std::string config_file;
  std::string format = "auto";
  std::vector<std::string> overrides;
  std::vector<std::string> ablations;
  std::optional<std::uint64_t> seed, epochs, max_steps, batch_size;
  std::optional<double> lr, label_smoothing;
  bool no_aux = false;
};

void add_train_flags(CLI::App* app, TrainFlags& f) {
  app->add_option("--data", f.data, "dataset directory or file");
  app->add_option("--config", f.config_file, "key = value settings file");
  app->add_option("--format", f.format, "auto, jsonl or tsv");
  app->add_option("--seed", f.seed, "run seed");
  app->add_option("--epochs", f.epochs);
  app->add_option("--max-steps", f.max_steps, "stop after this many updates (0: no cap)");
  app->add_option("--batch-size", f.batch_size);
  app->add_option("--lr", f.lr);
  app->add_option("--label-smoothing", f.label_smoothing);
  app->add_flag("--no-aux", f.no_aux, "train without qualifier-entity queries");
  app->add_option("--ablate", f.ablations, "entity-ln, entity-dropout or relation-ln (repeatable)");
  app->add_option("--set", f.overrides, "override any setting, key=value (repeatable)");
}

RunConfig build_config(const TrainFlags& f, RunConfig cfg) {
  if (!f.config_file.empty()) {
    KeyValues kv;
    try {
      kv = read_kv_file(f.config_file);
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
    cfg.apply(kv);
  }
  if (f.seed) cfg.train.seed = *f.seed;
  if (f.epochs) cfg.train.epochs = *f.epochs;
  if (f.max_steps) cfg.train.max_steps = *f.max_steps;
  if (f.batch_size) cfg.train.batch_size = *f.batch_size;
  if (f.lr) cfg.train.lr = *f.lr;
  if (f.label_smoothing) cfg.train.label_smoothing = *f.label_smoothing;
  if (f.no_aux) cfg.train.use_aux_task = false;
  for (const auto& a : f.ablations) apply_ablation(cfg, a);
  cfg.apply(parse_overrides(f.overrides));
  cfg.validate();
  return cfg;
}

data::KnowledgeGraph load_graph(const fs::path& path, const std::string& format) {
  data::DatasetFormat fmt;
  try {
    fmt = data::parse_format(format);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  try {
    return data::load_dataset(path, fmt);
  } catch (const data::ParseError& e) {
    throw ConfigError(e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
}

struct TrainOutcome {
  train::TrainResult result;
  fs::path best_checkpoint;
};

/// Trains one configuration into `out_dir` with a manifest.
TrainOutcome train_run(const RunConfig& cfg, const data::KnowledgeGraph& graph, const fs::path& data_path,
                       const fs::path& out_dir, std::ostream& out) {
  RunManifest manifest;
  manifest.command = "train";
  manifest.data = data_path.string();
  manifest.config = cfg.to_kv();
  manifest.seed = cfg.train.seed;
  manifest.dataset_checksum = hex64(data::dataset_checksum(data_path));
  manifest.version = version_string();
  manifest.started = utc_timestamp();
  manifest.status = "running";
  manifest.outputs = {{"best_checkpoint", "best.ckpt"},
                      {"last_checkpoint", "last.ckpt"},
                      {"log", "train_log.jsonl"},
                      {"mrr_vs_time", "mrr_vs_time.csv"},
                      {"config", "config.txt"}};
  fs::create_directories(out_dir);
  manifest.save(out_dir / "manifest.json");
  {
    std::ofstream cfg_out(out_dir / "config.txt", std::ios::trunc);
    cfg_out << format_kv(manifest.config);
  }

  std::optional<train::Trainer> trainer;
  try {
    trainer.emplace(graph, cfg.model, cfg.train);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const model::SequenceTooLong& e) {
    throw ConfigError(std::string(e.what()) + " (raise model.max_seq_len)");
  }
  out << "training: " << trainer->training_set().primary << " main + " << trainer->training_set().auxiliary
      << " qualifier queries, " << trainer->steps_per_epoch() << " steps/epoch, " << trainer->total_steps()
      << " steps, kernels " << simd::to_string(simd::active().isa) << "\n";

  train::TrainOptions opt;
  opt.out_dir = out_dir;
  opt.eval_threads = static_cast<std::size_t>(cfg.eval_threads);
  opt.header = {{"data.checksum", manifest.dataset_checksum}};
  const auto spe = trainer->steps_per_epoch();
  double epoch_loss = 0;
  std::size_t epoch_steps = 0;
  opt.on_step = [&](const train::StepRecord& r) {
    epoch_loss += r.loss;
    ++epoch_steps;
    if (r.step % spe == 0 || r.step == trainer->total_steps()) {
      out << "epoch " << r.epoch << "  step " << r.step << "  loss " << epoch_loss / static_cast<double>(epoch_steps)
          << "\n";
      epoch_loss = 0;
      epoch_steps = 0;
    }
  };
  opt.on_validation = [&](const train::ValidationRecord& v) {
    out << "  valid  mrr " << v.mrr << "  h@1 " << v.h1 << "  h@10 " << v.h10 << "\n";
  };

  TrainOutcome outcome;
  try {
    outcome.result = trainer->run(opt);
  } catch (const train::DivergenceError& e) {
    manifest.status = "diverged";
    manifest.finished = utc_timestamp();
    manifest.save(out_dir / "manifest.json");
    throw NumericalFailure(e.what());
  } catch (...) {
    manifest.status = "failed";
    manifest.finished = utc_timestamp();
    manifest.save(out_dir / "manifest.json");
    throw;
  }
  manifest.status = "ok";
  manifest.finished = utc_timestamp();
  manifest.save(out_dir / "manifest.json");
  outcome.best_checkpoint = out_dir / "best.ckpt";
  return outcome;
}

eval::RankReport evaluate_checkpoint(const fs::path& file, const data::KnowledgeGraph& graph, data::Split split,
                                     const eval::EvalOptions& opt) {
  num::Checkpoint ckpt;
  try {
    ckpt = num::load_checkpoint(file);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  try {
    eval::check_vocabulary(ckpt.header, graph);
  } catch (const eval::VocabularyMismatch& e) {
    throw ConfigError(e.what());
  }
  const auto model = model::HyTransformer::from_checkpoint(ckpt);
  const auto filter = data::build_filter_index(graph);
  return eval::evaluate(model, graph, split, filter, opt);
}

// ---- subcommands ----

int cmd_load_check(const std::string& data_arg, const std::string& format, std::ostream& out) {
  const auto path = resolve_data_path(data_arg);
  const auto graph = load_graph(path, format);
  graph.validate();
  out << "dataset    " << path.string() << "\n";
  out << "checksum   " << hex64(data::dataset_checksum(path)) << "\n";
  out << "entities   " << graph.num_entities() << "\n";
  out << "relations  " << graph.num_relations() << "\n";
  out << "max tokens " << graph.max_token_length() << "\n";
  for (auto split : data::kAllSplits) {
    const auto z = graph.count(split);
    if (z == 0) continue;
    const auto q = graph.total_qualifiers(split);
    out << data::to_string(split) << ": " << z << " statements, " << q << " qualifier pairs, "
        << 2 * z + q << " queries with qualifier targets\n";
  }
  out << "filter patterns " << data::build_filter_index(graph).num_patterns() << "\n";
  return kExitOk;
}

int cmd_train(const TrainFlags& flags, const std::string& out_dir, const std::string& from_manifest,
              std::ostream& out) {
  RunConfig base;
  TrainFlags f = flags;
  if (!from_manifest.empty()) {
    RunManifest m;
    try {
      m = RunManifest::load(from_manifest);
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
    base.apply(m.config);
    if (f.data.empty()) f.data = m.data;
  }
  if (f.data.empty()) throw ConfigError("--data is required");
  if (out_dir.empty()) throw ConfigError("--out is required");
  const auto cfg = build_config(f, base);
  const auto path = resolve_data_path(f.data);
  const auto graph = load_graph(path, f.format);
  out << "# effective config\n" << format_kv(cfg.to_kv());

  std::unique_ptr<RunLock> lock;
  try {
    lock = std::make_unique<RunLock>(out_dir);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  const auto outcome = train_run(cfg, graph, path, out_dir, out);
  if (outcome.result.best)
    out << "best valid mrr " << outcome.result.best->mrr << " at epoch " << outcome.result.best->epoch << "\n";
  out << "wrote " << (fs::path(out_dir) / "best.ckpt").string() << "\n";
  return kExitOk;
}

struct EvalFlags {
  std::string data, checkpoint, split = "test", breakdown = "none", ties, format = "auto", out;
  bool aux = false;
  std::size_t threads = 1;
  std::size_t batch_size = 256;
};

int cmd_eval(const EvalFlags& f, std::ostream& out) {
  if (f.checkpoint.empty()) throw ConfigError("--checkpoint is required");
  if (f.breakdown != "none" && f.breakdown != "qualifiers")
    throw ConfigError("--breakdown takes none or qualifiers");
  data::Split split;
  eval::EvalOptions opt;
  try {
    split = data::parse_split(f.split);
    if (!f.ties.empty()) opt.tie = eval::parse_tie_policy(f.ties);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  opt.include_aux = f.aux;
  opt.threads = std::max<std::size_t>(1, f.threads);
  opt.batch_size = std::max<std::size_t>(1, f.batch_size);
  const auto path = resolve_data_path(f.data);
  const auto graph = load_graph(path, f.format);
  if (graph.count(split) == 0) throw ConfigError("the " + f.split + " split is empty");
  const auto report = evaluate_checkpoint(f.checkpoint, graph, split, opt);
  out << eval::format_report(report, f.breakdown == "qualifiers");
  const auto record = eval::report_json(report);
  out << record << "\n";
  if (!f.out.empty()) {
    std::ofstream file(f.out, std::ios::app);
    if (!file) throw ConfigError("cannot write " + f.out);
    file << record << "\n";
  }
  return kExitOk;
}

struct BenchFlags {
  std::string data, format = "auto", out, phi = "product", isa = "auto";
  std::vector<std::string> sweeps;
  std::uint64_t layers = 2, reps = 5, base_d = 200, base_z = 10000, seed = 1;
  double min_rep_ms = 20;
};

std::vector<std::uint64_t> parse_list(const std::string& text, const std::string& what) {
  std::vector<std::uint64_t> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      values.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("bad " + what + " value '" + item + "'");
    }
  }
  if (values.empty()) throw ConfigError("empty " + what + " list");
  return values;
}

int cmd_bench(const BenchFlags& f, std::ostream& out) {
  bench::CostModelConfig cfg;
  cfg.gnn_layers = f.layers;
  cfg.repetitions = f.reps;
  cfg.base_d = f.base_d;
  cfg.base_z = f.base_z;
  cfg.seed = f.seed;
  cfg.min_rep_seconds = f.min_rep_ms / 1000.0;
  try {
    cfg.phi = bench::parse_composition(f.phi);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (const auto& s : f.sweeps) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--sweep takes axis=v1,v2,...");
    const auto axis = s.substr(0, eq);
    if (axis == "z") cfg.z_sweep = parse_list(s.substr(eq + 1), "z");
    else if (axis == "d") cfg.d_sweep = parse_list(s.substr(eq + 1), "d");
    else throw ConfigError("unknown sweep axis '" + axis + "' (z, d)");
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (f.isa == "scalar") simd::select(simd::Isa::scalar);
  else if (f.isa == "avx2") {
    if (!simd::select(simd::Isa::avx2)) throw ConfigError("AVX2 kernels are not available on this machine");
  } else if (f.isa != "auto") throw ConfigError("--isa takes auto, scalar or avx2");

  data::KnowledgeGraph graph;
  if (f.data.empty()) {
    data::RandomGraphSpec spec;
    spec.entities = 2000;
    spec.relations = 50;
    spec.statements = 5000;
    spec.max_qualifiers = 3;
    spec.seed = f.seed;
    graph = data::random_graph(spec);
    out << "synthetic graph: " << spec.entities << " entities, " << spec.relations << " relations\n";
  } else {
    graph = load_graph(resolve_data_path(f.data), f.format);
  }
  out << "kernels " << simd::to_string(simd::active().isa) << ", L_g " << cfg.gnn_layers << ", phi "
      << bench::to_string(cfg.phi) << ", reps " << cfg.repetitions << "\n";
  const auto records = bench::run_sweeps(graph, cfg);
  const auto fits = bench::fit_slopes(records);
  out << bench::report_table(records, fits);
  if (!f.out.empty()) {
    std::ofstream file(f.out, std::ios::trunc);
    if (!file) throw ConfigError("cannot write " + f.out);
    file << bench::records_csv(records);
  }
  return kExitOk;
}

int cmd_ablate(const TrainFlags& flags, const std::string& out_dir, const std::string& split_name,
               std::ostream& out) {
  if (flags.data.empty()) throw ConfigError("--data is required");
  if (out_dir.empty()) throw ConfigError("--out is required");
  if (!flags.ablations.empty()) throw ConfigError("ablate runs every ablation; do not pass --ablate");
  const auto base = build_config(flags, RunConfig{});
  const auto path = resolve_data_path(flags.data);
  const auto graph = load_graph(path, flags.format);
  data::Split split = data::Split::test;
  if (!split_name.empty()) {
    try {
      split = data::parse_split(split_name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (graph.count(data::Split::test) == 0) {
    split = data::Split::valid;
  }
  if (graph.count(split) == 0) throw ConfigError("the " + std::string(data::to_string(split)) + " split is empty");

  struct Variant {
    std::string label, dir, ablation;
    bool aux;
  };
  const std::vector<Variant> variants = {
      {"full", "full", "", true},
      {"-entity-LN", "no-entity-ln", "entity-ln", true},
      {"-entity-dropout", "no-entity-dropout", "entity-dropout", true},
      {"-relation-LN", "no-relation-ln", "relation-ln", true},
      {"-aux", "no-aux", "", false},
  };

  std::unique_ptr<RunLock> lock;
  try {
    lock = std::make_unique<RunLock>(out_dir);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  out << "# effective config\n" << format_kv(base.to_kv());
  RunManifest suite;
  suite.command = "ablate";
  suite.data = path.string();
  suite.config = base.to_kv();
  suite.seed = base.train.seed;
  suite.dataset_checksum = hex64(data::dataset_checksum(path));
  suite.version = version_string();
  suite.started = utc_timestamp();
  suite.status = "running";
  for (const auto& v : variants) suite.outputs[v.label] = v.dir;
  suite.outputs["table"] = "ablation.csv";
  suite.save(fs::path(out_dir) / "manifest.json");

  eval::EvalOptions opt;
  opt.tie = base.ties;
  opt.threads = static_cast<std::size_t>(base.eval_threads);
  opt.batch_size = static_cast<std::size_t>(base.train.eval_batch_size);
  std::vector<std::pair<std::string, eval::RankReport>> rows;
  for (const auto& v : variants) {
    auto cfg = base;
    if (!v.ablation.empty()) apply_ablation(cfg, v.ablation);
    cfg.train.use_aux_task = v.aux;
    out << "== " << v.label << "\n";
    try {
      const auto outcome = train_run(cfg, graph, path, fs::path(out_dir) / v.dir, out);
      rows.emplace_back(v.label, evaluate_checkpoint(outcome.best_checkpoint, graph, split, opt));
    } catch (...) {
      suite.status = "failed";
      suite.finished = utc_timestamp();
      suite.save(fs::path(out_dir) / "manifest.json");
      throw;
    }
  }

  std::ofstream csv(fs::path(out_dir) / "ablation.csv", std::ios::trunc);
  csv << "model,split,mrr,h1,h10\n";
  char buf[160];
  out << "\nablation (" << data::to_string(split) << ", seed " << base.train.seed << ")\n";
  std::snprintf(buf, sizeof buf, "%-18s %8s %8s %8s\n", "model", "MRR", "H@1", "H@10");
  out << buf;
  for (const auto& [label, r] : rows) {
    std::snprintf(buf, sizeof buf, "%-18s %8.3f %8.3f %8.3f\n", label.c_str(), r.overall.mrr, r.overall.h1,
                  r.overall.h10);
    out << buf;
    csv << '"' << label << "\"," << data::to_string(split) << ',' << r.overall.mrr << ',' << r.overall.h1 << ','
        << r.overall.h10 << '\n';
  }
  suite.status = "ok";
  suite.finished = utc_timestamp();
  suite.save(fs::path(out_dir) / "manifest.json");
  return kExitOk;
}

int cmd_describe(const std::string& checkpoint, const std::string& config_file, std::int32_t entities,
                 std::int32_t relations, std::ostream& out) {
  std::optional<model::HyTransformer> model;
  if (!checkpoint.empty()) {
    num::Checkpoint ckpt;
    try {
      ckpt = num::load_checkpoint(checkpoint);
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
    out << format_kv(ckpt.header) << "\n";
    model.emplace(model::HyTransformer::from_checkpoint(ckpt));
  } else {
    RunConfig cfg;
    if (!config_file.empty()) {
      try {
        cfg.apply(read_kv_file(config_file));
      } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
      }
    }
    cfg.validate();
    if (entities < 1 || relations < 1) throw ConfigError("--entities and --relations must be positive");
    model.emplace(cfg.model, entities, relations, cfg.train.seed);
  }
  char buf[200];
  for (const auto& p : model->parameters()) {
    std::snprintf(buf, sizeof buf, "%-28s %-14s %10zu\n", p.name.c_str(), num::to_string(p.tensor.shape()).c_str(),
                  p.tensor.numel());
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "%-28s %-14s %10zu\n", "total", "", model->parameter_count());
  out << buf;
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hyper-relational knowledge graph completion with a Transformer scorer", "hyt"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  std::string data_arg, format = "auto";
  auto* load_check = app.add_subcommand("load-check", "parse a dataset and print its statistics");
  load_check->add_option("--data", data_arg, "dataset directory or file")->required();
  load_check->add_option("--format", format, "auto, jsonl or tsv");

  TrainFlags train_flags;
  std::string train_out, from_manifest;
  auto* train = app.add_subcommand("train", "train a model");
  add_train_flags(train, train_flags);
  train->add_option("--out", train_out, "run directory");
  train->add_option("--from-manifest", from_manifest, "re-run the configuration recorded in a manifest.json");

  EvalFlags eval_flags;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint with filtered ranking");
  eval->add_option("--data", eval_flags.data)->required();
  eval->add_option("--checkpoint", eval_flags.checkpoint)->required();
  eval->add_option("--split", eval_flags.split, "train, valid or test");
  eval->add_option("--breakdown", eval_flags.breakdown, "none or qualifiers");
  eval->add_option("--ties", eval_flags.ties, "mean, optimistic or pessimistic");
  eval->add_option("--format", eval_flags.format);
  eval->add_option("--threads", eval_flags.threads);
  eval->add_option("--batch-size", eval_flags.batch_size);
  eval->add_option("--out", eval_flags.out, "append the JSON record to this file");
  eval->add_flag("--aux", eval_flags.aux, "also report qualifier-entity queries");

  BenchFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "time embedding processing against qualifier aggregation");
  bench->add_option("--data", bench_flags.data, "dataset to resample (default: synthetic)");
  bench->add_option("--format", bench_flags.format);
  bench->add_option("--sweep", bench_flags.sweeps, "z=10000,20000,40000 or d=100,200,400 (repeatable)");
  bench->add_option("--layers", bench_flags.layers, "simulated message-passing layers");
  bench->add_option("--phi", bench_flags.phi, "product, sum or circular-correlation");
  bench->add_option("--reps", bench_flags.reps);
  bench->add_option("--base-d", bench_flags.base_d);
  bench->add_option("--base-z", bench_flags.base_z);
  bench->add_option("--min-rep-ms", bench_flags.min_rep_ms);
  bench->add_option("--seed", bench_flags.seed);
  bench->add_option("--isa", bench_flags.isa, "auto, scalar or avx2");
  bench->add_option("--out", bench_flags.out, "CSV report");

  TrainFlags ablate_flags;
  std::string ablate_out, ablate_split;
  auto* ablate = app.add_subcommand("ablate", "train and compare the ablation variants");
  add_train_flags(ablate, ablate_flags);
  ablate->add_option("--out", ablate_out, "suite directory");
  ablate->add_option("--split", ablate_split, "split for the comparison (default test, else valid)");

  std::string describe_ckpt, describe_cfg;
  std::int32_t describe_n = 0, describe_m = 0;
  auto* describe = app.add_subcommand("describe", "list parameter tensors and counts");
  describe->add_option("--checkpoint", describe_ckpt);
  describe->add_option("--config", describe_cfg);
  describe->add_option("--entities", describe_n);
  describe->add_option("--relations", describe_m);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*load_check) return cmd_load_check(data_arg, format, out);
    if (*train) return cmd_train(train_flags, train_out, from_manifest, out);
    if (*eval) return cmd_eval(eval_flags, out);
    if (*bench) return cmd_bench(bench_flags, out);
    if (*ablate) return cmd_ablate(ablate_flags, ablate_out, ablate_split, out);
    if (*describe) {
      if (describe_ckpt.empty() && (describe_n == 0 || describe_m == 0))
        throw ConfigError("describe needs --checkpoint, or --entities and --relations");
      return cmd_describe(describe_ckpt, describe_cfg, describe_n, describe_m, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalFailure& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}

}  // namespace hyt::cli
