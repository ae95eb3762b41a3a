#include "hyt/eval/rank.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hyt::inline HYT_PREC::eval {

std::string_view to_string(TiePolicy policy) noexcept {
  switch (policy) {
    case TiePolicy::mean: return "mean";
    case TiePolicy::optimistic: return "optimistic";
    case TiePolicy::pessimistic: return "pessimistic";
  }
  return "?";
}

TiePolicy parse_tie_policy(std::string_view name) {
  if (name == "mean") return TiePolicy::mean;
  if (name == "optimistic") return TiePolicy::optimistic;
  if (name == "pessimistic") return TiePolicy::pessimistic;
  throw std::invalid_argument("unknown tie policy '" + std::string(name) + "' (mean, optimistic, pessimistic)");
}

double filtered_rank(std::span<const Real> scores, data::EntityId gold, std::span<const data::EntityId> filter,
                     TiePolicy tie) {
  if (gold < 0 || static_cast<std::size_t>(gold) >= scores.size())
    throw std::out_of_range("gold entity " + std::to_string(gold) + " outside " + std::to_string(scores.size()) +
                            " scores");
  const Real g = scores[static_cast<std::size_t>(gold)];
  if (std::isnan(g)) return static_cast<double>(scores.size());
  std::size_t greater = 0, ties = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > g) ++greater;
    else if (scores[i] == g) ++ties;
  }
  --ties;  // gold itself
  for (auto f : filter) {
    if (f == gold || f < 0 || static_cast<std::size_t>(f) >= scores.size()) continue;
    const Real s = scores[static_cast<std::size_t>(f)];
    if (s > g) --greater;
    else if (s == g) --ties;
  }
  double rank = 1.0 + static_cast<double>(greater);
  switch (tie) {
    case TiePolicy::mean: rank += 0.5 * static_cast<double>(ties); break;
    case TiePolicy::optimistic: break;
    case TiePolicy::pessimistic: rank += static_cast<double>(ties); break;
  }
  return rank;
}

Metrics metrics_from_ranks(std::span<const double> ranks) {
  Metrics m;
  m.count = ranks.size();
  if (ranks.empty()) return m;
  for (double r : ranks) {
    m.mrr += 1.0 / r;
    m.h1 += r <= 1 ? 1 : 0;
    m.h3 += r <= 3 ? 1 : 0;
    m.h10 += r <= 10 ? 1 : 0;
  }
  const auto n = static_cast<double>(ranks.size());
  m.mrr /= n;
  m.h1 /= n;
  m.h3 /= n;
  m.h10 /= n;
  return m;
}

Metrics mean_of(const Metrics& a, const Metrics& b) {
  return {(a.mrr + b.mrr) / 2, (a.h1 + b.h1) / 2, (a.h3 + b.h3) / 2, (a.h10 + b.h10) / 2, a.count + b.count};
}

}  // namespace hyt::inline HYT_PREC::eval
