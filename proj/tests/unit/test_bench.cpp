#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "hyt/bench/cost_bench.hpp"
#include "hyt/data/synthetic.hpp"

using namespace hyt;
using namespace hyt::bench;

namespace {

data::KnowledgeGraph base() {
  data::RandomGraphSpec spec;
  spec.entities = 100;
  spec.relations = 10;
  spec.statements = 300;
  spec.max_qualifiers = 3;
  return data::random_graph(spec);
}

}  // namespace

TEST_CASE("both workloads run and report positive times") {
  const auto g = base();
  CostModelConfig cfg;
  const auto a = bench_lightweight(g, 16, 3, 2);
  const auto b = bench_qualifier_aggregation(g, 16, cfg, 2);
  CHECK(a.method == "lightweight");
  CHECK(b.method == "aggregation");
  CHECK(a.median_s > 0);
  CHECK(b.median_s > 0);
  CHECK(a.min_s <= a.median_s);
  CHECK(a.median_s <= a.max_s);
  CHECK(b.z == 300);
  CHECK(a.n == 100);
}

TEST_CASE("an empty statement set is still timed") {
  auto g = base();
  g.statements.clear();
  g.splits.clear();
  CostModelConfig cfg;
  CHECK_NOTHROW(bench_qualifier_aggregation(g, 8, cfg, 1));
  CHECK(bench_lightweight(g, 8, 3, 1).z == 0);
}

TEST_CASE("resampling keeps the vocabularies") {
  const auto g = base();
  const auto r = resample_statements(g, 1000, 3);
  CHECK(r.num_statements() == 1000);
  CHECK(r.entities == g.entities);
  CHECK(r.relations == g.relations);
}

TEST_CASE("slope fit recovers exact power laws") {
  std::vector<TimingRecord> recs;
  for (std::size_t z : {1000u, 2000u, 4000u, 8000u}) {
    TimingRecord r;
    r.method = "aggregation";
    r.axis = "z";
    r.z = z;
    r.median_s = 3e-6 * static_cast<double>(z);
    recs.push_back(r);
    r.method = "lightweight";
    r.median_s = 0.01;
    recs.push_back(r);
  }
  for (std::size_t d : {50u, 100u, 200u}) {
    TimingRecord r;
    r.method = "aggregation";
    r.axis = "d";
    r.d = d;
    r.median_s = 1e-7 * static_cast<double>(d * d);
    recs.push_back(r);
  }
  const auto fits = fit_slopes(recs);
  REQUIRE(fits.size() == 3);
  for (const auto& f : fits) {
    CAPTURE(f.method);
    CAPTURE(f.axis);
    const double want = f.method == "lightweight" ? 0.0 : f.axis == "z" ? 1.0 : 2.0;
    CHECK(f.slope == doctest::Approx(want).epsilon(1e-9));
  }
  CHECK(records_csv(recs).find("method") != std::string::npos);
  CHECK(!report_table(recs, fits).empty());
}

TEST_CASE("config validation and composition names") {
  CostModelConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.repetitions = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK(parse_composition("circular-correlation") == Composition::circular_correlation);
  CHECK(to_string(Composition::sum) == "sum");
  for (auto phi : {Composition::product, Composition::sum, Composition::circular_correlation}) {
    CostModelConfig c;
    c.phi = phi;
    CHECK(bench_qualifier_aggregation(base(), 8, c, 1).median_s > 0);
  }
}
