// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion 4   run one

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "f64_bridge.hpp"
#include "hyt/bench/cost_bench.hpp"
#include "hyt/data/queries.hpp"
#include "hyt/data/synthetic.hpp"
#include "hyt/eval/evaluate.hpp"
#include "hyt/num/grad_check.hpp"
#include "hyt/train/trainer.hpp"
#include "toy_problem.hpp"

namespace fs = std::filesystem;
using namespace hyt;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Small network used by every training criterion.
model::ModelConfig small_model(std::size_t seq_len) {
  model::ModelConfig m;
  m.d_embed = 32;
  m.d_hidden = 64;
  m.n_layers = 1;
  m.n_heads = 4;
  m.max_seq_len = seq_len;
  return m;
}

// ---------------------------------------------------------------- 1

// Denominator floors for the relative error. Double: absolute. Single: a
// fraction of the largest gradient, since float accumulation leaves ~1e-8
// absolute noise on every coordinate.
constexpr double kFloor64 = 1e-5;
constexpr double kFloor32Fraction = 1e-3;

Outcome gradient_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst64 = 0, worst32 = 0;
  std::string where64, where32;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto r = hyt_f64::toy_self_check(seed, 1e-3, kFloor64);
    if (r.max_rel_error >= worst64) {
      worst64 = r.max_rel_error;
      where64 = r.worst;
    }

    auto p = toy::make_toy_problem(seed);
    auto params = p.model.parameter_tensors();
    for (auto& t : params) t.zero_grad();
    num::backward(toy::toy_loss(p));
    std::vector<std::vector<double>> values;
    for (const auto& t : params) values.emplace_back(t.values().begin(), t.values().end());
    const auto numeric = hyt_f64::toy_numeric_gradient(seed, values, 1e-3);
    double largest = 0;
    for (const auto& g : numeric)
      for (double x : g) largest = std::max(largest, std::abs(x));
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto g = params[i].grad();
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double e = num::relative_error(g[j], numeric[i][j], kFloor32Fraction * largest);
        if (e > worst32) {
          worst32 = e;
          where32 = p.model.parameters()[i].name + "[" + std::to_string(j) + "]";
        }
      }
    }
  }
  const double t = seconds_since(t0);
  Outcome o;
  o.pass = worst32 < 1e-4 && worst64 < 1e-7 && t < 60;
  o.detail = "32-bit max rel err " + fmt("%.2e", worst32) + " (" + where32 + "), 64-bit " + fmt("%.2e", worst64) +
             " (" + where64 + "), " + fmt("%.1fs", t);
  return o;
}

// ---------------------------------------------------------------- 2

// Rank from the definition: drop filtered competitors, sort the rest by
// score, and average the 1-based positions occupied by the gold score.
double oracle_rank(const std::vector<Real>& scores, int gold, const std::set<int>& filter) {
  std::vector<Real> pool;
  for (int i = 0; i < static_cast<int>(scores.size()); ++i)
    if (i == gold || !filter.contains(i)) pool.push_back(scores[static_cast<std::size_t>(i)]);
  std::sort(pool.begin(), pool.end(), std::greater<>());
  const Real g = scores[static_cast<std::size_t>(gold)];
  const auto first = std::find(pool.begin(), pool.end(), g) - pool.begin();
  const auto last = pool.rend() - std::find(pool.rbegin(), pool.rend(), g) - 1;
  return (static_cast<double>(first) + static_cast<double>(last)) / 2.0 + 1.0;
}

Outcome metric_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(2024, 2);
  std::vector<double> module_ranks, oracle_ranks;
  std::size_t rank_mismatches = 0;
  for (int inst = 0; inst < 1000; ++inst) {
    const auto n = 1 + static_cast<int>(rng.below(50));
    std::vector<Real> scores(static_cast<std::size_t>(n));
    const bool coarse = rng.uniform() < 0.5;  // coarse scores produce many ties
    for (auto& s : scores) s = coarse ? static_cast<Real>(rng.below(5)) : static_cast<Real>(rng.normal());
    const int gold = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    std::set<int> filter;
    const auto k = rng.below(static_cast<std::uint64_t>(n) + 1);
    for (std::uint64_t i = 0; i < k; ++i) filter.insert(static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
    std::vector<data::EntityId> filter_ids(filter.begin(), filter.end());
    Rng order(inst, 3);
    shuffle(std::span<data::EntityId>(filter_ids), order);

    const double a = eval::filtered_rank(scores, gold, filter_ids, eval::TiePolicy::mean);
    const double b = oracle_rank(scores, gold, filter);
    if (a != b) ++rank_mismatches;
    module_ranks.push_back(a);
    oracle_ranks.push_back(b);
  }
  const auto m = eval::metrics_from_ranks(module_ranks);
  double mrr = 0, h1 = 0, h10 = 0;
  for (double r : oracle_ranks) {
    mrr += 1.0 / r;
    h1 += r <= 1.0 ? 1.0 : 0.0;
    h10 += r <= 10.0 ? 1.0 : 0.0;
  }
  mrr /= 1000.0;
  h1 /= 1000.0;
  h10 /= 1000.0;
  const double t = seconds_since(t0);
  Outcome o;
  o.pass = rank_mismatches == 0 && m.mrr == mrr && m.h1 == h1 && m.h10 == h10 && t < 60;
  o.detail = std::to_string(rank_mismatches) + " rank mismatches in 1000 instances; MRR " + fmt("%.6f", m.mrr) +
             " vs " + fmt("%.6f", mrr) + ", H@1 " + fmt("%.4f", m.h1) + " vs " + fmt("%.4f", h1) + ", H@10 " +
             fmt("%.4f", m.h10) + " vs " + fmt("%.4f", h10) + ", " + fmt("%.1fs", t);
  return o;
}

// ---------------------------------------------------------------- 3

Outcome capacity() {
  const auto t0 = std::chrono::steady_clock::now();
  data::RandomGraphSpec spec;
  spec.entities = 50;
  spec.relations = 5;
  spec.statements = 200;
  spec.qualifier_fraction = 0.5;
  spec.max_qualifiers = 2;
  spec.seed = 11;
  const auto graph = data::random_graph(spec);

  auto m = small_model(7);
  m.attn_dropout = m.ent_emb_dropout = m.head_dropout = 0;
  train::TrainConfig t;
  t.lr = 3e-3;
  t.epochs = 0;
  t.max_steps = 500;
  t.batch_size = 128;
  t.eval_every = 0;
  t.seed = 1;
  train::Trainer trainer(graph, m, t);
  trainer.run();
  const data::FilterIndex filter(graph);
  const auto report = eval::evaluate(trainer.model(), graph, data::Split::train, filter);
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = report.overall.mrr >= 0.95 && secs < 300;
  o.detail = "train-split filtered MRR " + fmt("%.4f", report.overall.mrr) + " after " +
             std::to_string(trainer.step()) + " steps, " + fmt("%.1fs", secs);
  return o;
}

// ---------------------------------------------------------------- 4 and 5

data::KnowledgeGraph functional_graph() {
  data::FunctionalQualifierSpec spec;
  spec.entities = 40;
  spec.main_relations = 4;
  spec.pairs = 120;
  spec.copies = 2;
  spec.valid_prob = 0.5;
  spec.seed = 7;
  return data::functional_qualifier_graph(spec);
}

// Toy network with light dropout everywhere.
model::ModelConfig directional_model() {
  auto m = small_model(7);
  m.ent_emb_dropout = m.attn_dropout = m.head_dropout = 0.1;
  return m;
}

train::TrainConfig directional_train_config(std::uint64_t seed) {
  train::TrainConfig t;
  t.lr = 3e-3;
  t.epochs = 0;
  t.max_steps = 5000;
  t.batch_size = 64;
  t.eval_every = 0;
  t.seed = seed;
  return t;
}

struct DirectionalRun {
  double main_mrr = 0;
  double qualifier_accuracy = 0;
};

// Main-task validation MRR and H@1 on the functional qualifier slot (index 0)
// of every validation statement.
DirectionalRun train_and_score(const data::KnowledgeGraph& graph, const model::ModelConfig& m,
                               const train::TrainConfig& t) {
  train::Trainer trainer(graph, m, t);
  trainer.run();
  const data::FilterIndex filter(graph);
  DirectionalRun r;
  r.main_mrr = trainer.validate().overall.mrr;
  std::vector<data::CompletionQuery> qualifier_queries;
  for (auto i : graph.indices(data::Split::valid))
    qualifier_queries.push_back({i, data::MaskedSlot::qualifier(0), graph.statements[i].qualifiers[0].entity});
  const auto ranks = eval::rank_queries(trainer.model(), graph, qualifier_queries, filter);
  r.qualifier_accuracy = eval::metrics_from_ranks(ranks).h1;
  return r;
}

Outcome auxiliary_direction() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto graph = functional_graph();
  const auto m = directional_model();
  auto on_cfg = directional_train_config(1);
  auto off_cfg = on_cfg;
  off_cfg.use_aux_task = false;
  const auto on = train_and_score(graph, m, on_cfg);
  const auto off = train_and_score(graph, m, off_cfg);
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = on.qualifier_accuracy - off.qualifier_accuracy >= 0.10 && on.main_mrr >= off.main_mrr - 0.01 && secs < 600;
  o.detail = "qualifier accuracy aux-on " + fmt("%.3f", on.qualifier_accuracy) + " vs aux-off " +
             fmt("%.3f", off.qualifier_accuracy) + "; main valid MRR " + fmt("%.4f", on.main_mrr) + " vs " +
             fmt("%.4f", off.main_mrr) + ", " + fmt("%.1fs", secs);
  return o;
}

Outcome ablation_direction() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto graph = functional_graph();
  const auto full = directional_model();
  auto no_ln = full;
  no_ln.use_entity_ln = false;
  auto no_dropout = full;
  no_dropout.use_entity_dropout = false;
  double delta_ln = 0, delta_dropout = 0;
  std::string runs;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto t = directional_train_config(seed);
    const double base = train_and_score(graph, full, t).main_mrr;
    const double a = train_and_score(graph, no_ln, t).main_mrr;
    const double b = train_and_score(graph, no_dropout, t).main_mrr;
    delta_ln += (a - base) / 5;
    delta_dropout += (b - base) / 5;
    runs += " " + fmt("%.3f", base) + "/" + fmt("%.3f", a) + "/" + fmt("%.3f", b);
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = delta_ln <= 0 && delta_dropout <= 0;
  o.detail = "mean MRR delta -entity-LN " + fmt("%+.4f", delta_ln) + ", -entity-dropout " + fmt("%+.4f", delta_dropout) +
             " (full/-LN/-dropout per seed:" + runs + "), " + fmt("%.1fs", secs);
  return o;
}

// ---------------------------------------------------------------- 6

Outcome complexity() {
  const auto t0 = std::chrono::steady_clock::now();
  data::RandomGraphSpec spec;
  spec.entities = 2000;
  spec.relations = 50;
  spec.statements = 5000;
  spec.qualifier_fraction = 0.5;
  spec.max_qualifiers = 3;
  spec.seed = 5;
  const auto base = data::random_graph(spec);
  bench::CostModelConfig cfg;
  cfg.repetitions = 7;
  cfg.min_rep_seconds = 0.05;
  const auto records = bench::run_sweeps(base, cfg);
  const auto fits = bench::fit_slopes(records);
  std::map<std::string, double> slope;
  for (const auto& f : fits) slope[f.method + "/" + f.axis] = f.slope;
  const double lz = slope["lightweight/z"], az = slope["aggregation/z"], ad = slope["aggregation/d"],
               ld = slope["lightweight/d"];
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = std::abs(lz) < 0.15 && std::abs(az - 1.0) <= 0.2 && std::abs(ad - 2.0) <= 0.3 && std::abs(ld - 1.0) <= 0.3 &&
           fits.size() == 4 && secs < 600;
  o.detail = "slopes lightweight~Z " + fmt("%+.3f", lz) + ", aggregation~Z " + fmt("%.3f", az) + ", aggregation~d " +
             fmt("%.3f", ad) + ", lightweight~d " + fmt("%.3f", ld) + ", " + fmt("%.1fs", secs);
  return o;
}

// ---------------------------------------------------------------- 7

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto graph = functional_graph();
  const auto m = small_model(7);
  auto t = directional_train_config(42);
  t.max_steps = 60;
  t.eval_every = 1;
  t.log_wall_clock = false;
  const auto root = fs::temp_directory_path() / ("hyt_acceptance_" + std::to_string(::getpid()));
  std::vector<std::string> files[2];
  for (int run = 0; run < 2; ++run) {
    const auto dir = root / ("run" + std::to_string(run));
    fs::remove_all(dir);
    train::Trainer trainer(graph, m, t);
    train::TrainOptions opt;
    opt.out_dir = dir;
    trainer.run(opt);
    for (const char* name : {"best.ckpt", "last.ckpt", "train_log.jsonl"}) files[run].push_back(slurp(dir / name));
  }
  fs::remove_all(root);
  bool same = true;
  std::string sizes;
  for (std::size_t i = 0; i < files[0].size(); ++i) {
    same = same && !files[0][i].empty() && files[0][i] == files[1][i];
    sizes += (i ? ", " : "") + std::to_string(files[0][i].size());
  }
  Outcome o;
  o.pass = same;
  o.detail = std::string(same ? "identical" : "differing") + " best.ckpt, last.ckpt and train_log.jsonl (" + sizes +
             " bytes), " + fmt("%.1fs", seconds_since(t0));
  return o;
}

// ---------------------------------------------------------------- 8

std::multiset<data::Qualifier> without(const std::vector<data::Qualifier>& qs, std::size_t skip) {
  std::multiset<data::Qualifier> out;
  for (std::size_t i = 0; i < qs.size(); ++i)
    if (i != skip) out.insert(qs[i]);
  return out;
}

// Answers for (statement, slot) by scanning every statement.
std::vector<data::EntityId> brute_force_answers(const data::KnowledgeGraph& g, const data::Statement& s,
                                                data::MaskedSlot slot) {
  std::set<data::EntityId> out;
  const auto npos = static_cast<std::size_t>(-1);
  for (const auto& o : g.statements) {
    if (o.relation != s.relation) continue;
    switch (slot.kind) {
      case data::MaskedSlot::Kind::head:
        if (o.tail == s.tail && without(o.qualifiers, npos) == without(s.qualifiers, npos)) out.insert(o.head);
        break;
      case data::MaskedSlot::Kind::tail:
        if (o.head == s.head && without(o.qualifiers, npos) == without(s.qualifiers, npos)) out.insert(o.tail);
        break;
      case data::MaskedSlot::Kind::qualifier: {
        if (o.head != s.head || o.tail != s.tail) break;
        const auto rel = s.qualifiers[slot.qualifier_index].relation;
        const auto rest = without(s.qualifiers, slot.qualifier_index);
        for (std::size_t j = 0; j < o.qualifiers.size(); ++j)
          if (o.qualifiers[j].relation == rel && without(o.qualifiers, j) == rest) out.insert(o.qualifiers[j].entity);
        break;
      }
    }
  }
  return {out.begin(), out.end()};
}

Outcome data_contracts() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t count_failures = 0, filter_failures = 0, graphs = 0, patterns = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    data::RandomGraphSpec spec;
    spec.entities = seed % 2 ? 12 : 60;  // small vocabularies force shared patterns
    spec.relations = 3;
    spec.statements = 150 * seed + 100;
    spec.qualifier_fraction = 0.6;
    spec.max_qualifiers = 3;
    spec.valid_fraction = 0.1;
    spec.test_fraction = 0.1;
    spec.seed = seed;
    const auto g = data::random_graph(spec);
    ++graphs;

    for (auto split : data::kAllSplits) {
      const auto expected = 2 * g.count(split) + g.total_qualifiers(split);
      if (data::build_queries(g, split, true).size() != expected) ++count_failures;
      if (data::build_queries(g, split, false).size() != 2 * g.count(split)) ++count_failures;
    }
    train::TrainConfig t;
    const auto set = train::build_training_set(g, t, 9);
    if (set.size() != 2 * g.count(data::Split::train) + g.total_qualifiers(data::Split::train)) ++count_failures;

    const data::FilterIndex index(g);
    for (const auto& s : g.statements) {
      std::vector<data::MaskedSlot> slots{data::MaskedSlot::head(), data::MaskedSlot::tail()};
      for (std::uint32_t i = 0; i < s.qualifiers.size(); ++i) slots.push_back(data::MaskedSlot::qualifier(i));
      for (auto slot : slots) {
        const auto got = index.answers(s, slot);
        const auto want = brute_force_answers(g, s, slot);
        if (!std::equal(got.begin(), got.end(), want.begin(), want.end())) ++filter_failures;
        ++patterns;
      }
    }
  }
  Outcome o;
  o.pass = count_failures == 0 && filter_failures == 0;
  o.detail = std::to_string(count_failures) + " query-count mismatches, " + std::to_string(filter_failures) + " of " +
             std::to_string(patterns) + " filter sets differ from a full scan (" + std::to_string(graphs) +
             " graphs), " + fmt("%.1fs", seconds_since(t0));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-8)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient correctness", gradient_correctness},
      {"metric oracle equivalence", metric_oracle},
      {"capacity / overfit", capacity},
      {"auxiliary-task direction", auxiliary_direction},
      {"ablation direction", ablation_direction},
      {"complexity validation", complexity},
      {"determinism", determinism},
      {"data contracts", data_contracts},
  };
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
