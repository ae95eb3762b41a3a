#include "hyt/eval/evaluate.hpp"

#include <cstdio>
#include <map>
#include <thread>

#include <json.hpp>

namespace hyt::inline HYT_PREC::eval {

namespace {

void rank_batches(const model::HyTransformer& model, const data::KnowledgeGraph& graph,
                  std::span<const data::CompletionQuery> queries, const data::FilterIndex& filter,
                  const model::ProcessedEmbeddings& emb, const EvalOptions& opt, std::size_t first_batch,
                  std::size_t stride, std::vector<double>& ranks) {
  num::NoGradGuard no_grad;
  Rng unused(0);
  const auto seq_len = model.config().max_seq_len;
  const auto n = static_cast<std::size_t>(model.num_entities());
  std::vector<model::TokenSequence> batch;
  for (std::size_t begin = first_batch * opt.batch_size; begin < queries.size(); begin += stride * opt.batch_size) {
    const auto end = std::min(queries.size(), begin + opt.batch_size);
    batch.clear();
    for (std::size_t i = begin; i < end; ++i)
      batch.push_back(model::flatten(graph.statements[queries[i].statement], queries[i].slot, seq_len));
    const auto logits = model.logits(batch, emb, num::Mode::eval, unused);
    const auto values = logits.values();
    for (std::size_t i = begin; i < end; ++i) {
      const auto row = values.subspan((i - begin) * n, n);
      ranks[i] = filtered_rank(row, queries[i].gold, filter.answers(graph, queries[i]), opt.tie);
    }
  }
}

nlohmann::json metrics_json(const Metrics& m) {
  return {{"mrr", m.mrr}, {"h1", m.h1}, {"h3", m.h3}, {"h10", m.h10}, {"count", m.count}};
}

std::string metrics_row(const std::string& label, const Metrics& m) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-14s %8.3f %8.3f %8.3f %8.3f %8zu\n", label.c_str(), m.mrr, m.h1, m.h3, m.h10,
                m.count);
  return buf;
}

}  // namespace

std::vector<double> rank_queries(const model::HyTransformer& model, const data::KnowledgeGraph& graph,
                                 std::span<const data::CompletionQuery> queries, const data::FilterIndex& filter,
                                 const EvalOptions& options) {
  if (options.batch_size == 0) throw std::invalid_argument("evaluation batch size must be positive");
  if (graph.num_entities() != model.num_entities() || graph.num_relations() != model.num_relations())
    throw VocabularyMismatch("model has " + std::to_string(model.num_entities()) + " entities and " +
                             std::to_string(model.num_relations()) + " relations, data has " +
                             std::to_string(graph.num_entities()) + " and " + std::to_string(graph.num_relations()));
  std::vector<double> ranks(queries.size(), 0.0);
  model::ProcessedEmbeddings emb;
  {
    num::NoGradGuard no_grad;
    Rng unused(0);
    emb = model.process_embeddings(num::Mode::eval, unused);
  }
  const auto batches = (queries.size() + options.batch_size - 1) / options.batch_size;
  const auto threads = std::max<std::size_t>(1, std::min(options.threads, batches));
  if (threads == 1) {
    rank_batches(model, graph, queries, filter, emb, options, 0, 1, ranks);
    return ranks;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        rank_batches(model, graph, queries, filter, emb, options, t, threads, ranks);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return ranks;
}

RankReport summarize(const data::KnowledgeGraph& graph, std::span<const data::CompletionQuery> queries,
                     std::span<const double> ranks, std::string split, TiePolicy tie) {
  if (ranks.size() != queries.size()) throw std::invalid_argument("summarize: ranks and queries differ in length");
  RankReport report;
  report.split = std::move(split);
  report.tie = tie;
  std::vector<double> head, tail, aux;
  std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> by_n;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& q = queries[i];
    const auto n = graph.statements[q.statement].qualifiers.size();
    switch (q.slot.kind) {
      case data::MaskedSlot::Kind::head:
        head.push_back(ranks[i]);
        by_n[n].first.push_back(ranks[i]);
        break;
      case data::MaskedSlot::Kind::tail:
        tail.push_back(ranks[i]);
        by_n[n].second.push_back(ranks[i]);
        break;
      case data::MaskedSlot::Kind::qualifier:
        aux.push_back(ranks[i]);
        break;
    }
  }
  report.head = metrics_from_ranks(head);
  report.tail = metrics_from_ranks(tail);
  report.overall = mean_of(report.head, report.tail);
  report.queries = head.size() + tail.size();
  for (const auto& [n, pools] : by_n) {
    QualifierCountRow row;
    row.qualifiers = n;
    row.head = metrics_from_ranks(pools.first);
    row.tail = metrics_from_ranks(pools.second);
    row.overall = mean_of(row.head, row.tail);
    report.by_qualifiers.push_back(row);
  }
  if (!aux.empty()) report.aux = metrics_from_ranks(aux);
  return report;
}

RankReport evaluate(const model::HyTransformer& model, const data::KnowledgeGraph& graph, data::Split split,
                    const data::FilterIndex& filter, const EvalOptions& options) {
  if (graph.count(split) == 0)
    throw std::invalid_argument("the " + std::string(data::to_string(split)) + " split is empty");
  const auto queries = data::build_queries(graph, split, options.include_aux);
  const auto ranks = rank_queries(model, graph, queries, filter, options);
  auto report = summarize(graph, queries, ranks, std::string(data::to_string(split)), options.tie);
  if (options.include_aux && !report.aux) report.aux = Metrics{};
  return report;
}

KeyValues vocabulary_header(const data::KnowledgeGraph& graph) {
  return {
      {"data.num_entities", std::to_string(graph.num_entities())},
      {"data.num_relations", std::to_string(graph.num_relations())},
      {"data.entity_fingerprint", std::to_string(graph.entities.fingerprint())},
      {"data.relation_fingerprint", std::to_string(graph.relations.fingerprint())},
  };
}

void check_vocabulary(const KeyValues& header, const data::KnowledgeGraph& graph) {
  const auto expected = vocabulary_header(graph);
  for (const auto& [key, value] : expected) {
    auto it = header.find(key);
    if (it == header.end()) continue;
    if (it->second != value)
      throw VocabularyMismatch("checkpoint was trained on different data: " + key + " is " + it->second +
                               " in the checkpoint but " + value + " for this dataset");
  }
  const std::pair<const char*, std::int32_t> sizes[] = {{"model.num_entities", graph.num_entities()},
                                                        {"model.num_relations", graph.num_relations()}};
  for (const auto& [key, n] : sizes) {
    auto it = header.find(key);
    if (it != header.end() && it->second != std::to_string(n))
      throw VocabularyMismatch(std::string("checkpoint ") + key + " is " + it->second + " but the dataset has " +
                               std::to_string(n));
  }
}

std::string format_report(const RankReport& r, bool breakdown) {
  std::string out = "split: " + r.split + "  queries: " + std::to_string(r.queries) +
                    "  ties: " + std::string(to_string(r.tie)) + "\n";
  char header[128];
  std::snprintf(header, sizeof header, "%-14s %8s %8s %8s %8s %8s\n", "", "MRR", "H@1", "H@3", "H@10", "queries");
  out += header;
  out += metrics_row("overall", r.overall);
  out += metrics_row("head", r.head);
  out += metrics_row("tail", r.tail);
  if (breakdown)
    for (const auto& row : r.by_qualifiers) out += metrics_row("n=" + std::to_string(row.qualifiers), row.overall);
  if (r.aux) out += metrics_row("qualifier", *r.aux);
  return out;
}

std::string report_json(const RankReport& r) {
  nlohmann::json j = {{"split", r.split},
                      {"ties", std::string(to_string(r.tie))},
                      {"queries", r.queries},
                      {"mrr", r.overall.mrr},
                      {"h1", r.overall.h1},
                      {"h3", r.overall.h3},
                      {"h10", r.overall.h10},
                      {"head", metrics_json(r.head)},
                      {"tail", metrics_json(r.tail)}};
  auto rows = nlohmann::json::array();
  for (const auto& row : r.by_qualifiers)
    rows.push_back({{"qualifiers", row.qualifiers},
                    {"overall", metrics_json(row.overall)},
                    {"head", metrics_json(row.head)},
                    {"tail", metrics_json(row.tail)}});
  j["by_qualifiers"] = std::move(rows);
  if (r.aux) j["qualifier"] = metrics_json(*r.aux);
  return j.dump();
}

}  // namespace hyt::inline HYT_PREC::eval
