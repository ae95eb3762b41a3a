#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hyt/config.hpp"
#include "hyt/data/statement.hpp"

namespace hyt::inline HYT_PREC::bench {

/// Pairwise composition for a qualifier (relation, entity) embedding pair.
enum class Composition { product, sum, circular_correlation };

std::string_view to_string(Composition c) noexcept;
Composition parse_composition(std::string_view name);

struct CostModelConfig {
  std::uint64_t gnn_layers = 2;  // L_g
  Composition phi = Composition::product;
  std::uint64_t repetitions = 5;
  /// Each timed repetition loops its workload enough times to last at least
  /// this long; the loop count is fixed per sweep so ratios stay comparable.
  double min_rep_seconds = 0.02;
  std::vector<std::uint64_t> d_sweep{100, 200, 400};
  std::vector<std::uint64_t> z_sweep{10000, 20000, 40000};
  std::uint64_t base_d = 200;  // d while sweeping Z
  std::uint64_t base_z = 10000;  // Z while sweeping d
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument (repetitions < 3, empty sweep, ...).
  void validate() const;
};

struct TimingRecord {
  std::string method;  // "lightweight" or "aggregation"
  std::string axis;    // "z", "d" or "" for a single point
  std::size_t z = 0, n = 0, m = 0, d = 0;
  std::uint64_t reps = 0;
  std::uint64_t inner_loops = 1;
  double median_s = 0;  // per workload pass
  double min_s = 0;
  double max_s = 0;
};

/// Times E^ = Dropout(LN(E)), R^ = LN(R) on (N+1) x d and M x d tables,
/// forward only. The statements themselves are never touched.
TimingRecord bench_lightweight(const data::KnowledgeGraph& graph, std::size_t d, std::uint64_t reps,
                               std::uint64_t inner_loops = 1, std::uint64_t seed = 1);

/// Times L_g passes of h_Q = W * sum_i phi(R^[qr_i], E^[qe_i]) over every
/// statement, followed by a scatter of h_Q into the head entity's row of the
/// next layer's entity buffer. Forward only; O(L_g Z d^2).
TimingRecord bench_qualifier_aggregation(const data::KnowledgeGraph& graph, std::size_t d,
                                         const CostModelConfig& cfg, std::uint64_t inner_loops = 1);

/// Graph with the vocabularies of `base` and `z` statements drawn from it
/// with replacement (all train).
data::KnowledgeGraph resample_statements(const data::KnowledgeGraph& base, std::size_t z, std::uint64_t seed);

/// Both methods over the Z sweep (at base_d) and the d sweep (at base_z).
std::vector<TimingRecord> run_sweeps(const data::KnowledgeGraph& base, const CostModelConfig& cfg);

struct SlopeFit {
  std::string method;
  std::string axis;
  double slope = 0;
  double intercept = 0;
  std::size_t points = 0;
};

/// Least-squares slope of log(median_s) against log(axis value) per
/// (method, axis) with at least two points.
std::vector<SlopeFit> fit_slopes(const std::vector<TimingRecord>& records);

std::string records_csv(const std::vector<TimingRecord>& records);
std::string report_table(const std::vector<TimingRecord>& records, const std::vector<SlopeFit>& fits);

}  // namespace hyt::inline HYT_PREC::bench
