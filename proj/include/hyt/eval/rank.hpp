#pragma once

#include <span>
#include <string_view>

#include "hyt/config.hpp"
#include "hyt/data/statement.hpp"

namespace hyt::inline HYT_PREC::eval {

/// How exact score ties with the gold entity count toward its rank.
enum class TiePolicy { mean, optimistic, pessimistic };

std::string_view to_string(TiePolicy policy) noexcept;
/// Throws std::invalid_argument for anything but mean/optimistic/pessimistic.
TiePolicy parse_tie_policy(std::string_view name);

/// Filtered rank of `gold` among `scores`.
///
/// Entities in `filter` other than gold are taken out of contention. Among
/// the rest, rank = 1 + #(score > gold's) + k * #(score == gold's), with
/// k = 1/2, 0 or 1 for mean, optimistic and pessimistic. `filter` must not
/// contain duplicates; ids outside the score vector are ignored. A NaN gold
/// score ranks last.
double filtered_rank(std::span<const Real> scores, data::EntityId gold, std::span<const data::EntityId> filter,
                     TiePolicy tie = TiePolicy::mean);

struct Metrics {
  double mrr = 0;
  double h1 = 0;
  double h3 = 0;
  double h10 = 0;
  std::size_t count = 0;
};

/// MRR and H@k (rank <= k) over the ranks, summed in order.
Metrics metrics_from_ranks(std::span<const double> ranks);
/// Field-wise unweighted mean; count is the sum.
Metrics mean_of(const Metrics& a, const Metrics& b);

}  // namespace hyt::inline HYT_PREC::eval
