#include <doctest.h>

#include <set>
#include <sstream>

#include "rne/ingest.hpp"
#include "rne/sweep.hpp"

using namespace rne;

TEST_SUITE("sweep") {
  TEST_CASE("default grid enumerates 45 one-at-a-time configurations") {
    SweepGrid grid;
    auto configs = enumerate_grid(grid);
    CHECK(configs.size() == 45);
    for (std::size_t d : {64, 128, 256}) {
      std::size_t per_d = 0;
      for (const auto& c : configs) {
        if (c.d != d) continue;
        ++per_d;
        const int off_baseline = (c.p != 1.0) + (c.q != 1.0) + (c.c != 10);
        CHECK(off_baseline <= 1);
      }
      CHECK(per_d == 15);
    }
    std::set<std::tuple<double, double, std::size_t, std::size_t>> unique;
    for (const auto& c : configs) unique.emplace(c.p, c.q, c.c, c.d);
    CHECK(unique.size() == 45);
  }

  TEST_CASE("grid validation") {
    SweepGrid grid;
    grid.p_values.clear();
    CHECK_THROWS_AS(enumerate_grid(grid), std::invalid_argument);
    grid = {};
    grid.q_values.push_back(0.0);
    CHECK_THROWS_AS(enumerate_grid(grid), std::invalid_argument);
  }

  TEST_CASE("ratio aggregation averages configurations sharing p/q") {
    SweepGrid grid;
    auto row = [](double p, double q, std::size_t c, double test) {
      return SweepRow{{p, q, c, 64}, ClassifierKind::forest, test / 2, test, {}};
    };
    const std::vector<SweepRow> rows{row(4, 1, 10, 0.6), row(1, 0.25, 10, 0.8), row(1, 1, 10, 0.5),
                                     row(1, 1, 25, 0.9), row(0.5, 1, 10, 0.2)};
    auto ratios = aggregate_ratios(rows, grid);
    auto find = [&](double ratio, bool test) {
      for (const auto& r : ratios) {
        if (r.pq_ratio == ratio && r.test == test) return r;
      }
      FAIL("ratio missing");
      return RatioRow{};
    };
    CHECK(find(4.0, true).macro_f1 == doctest::Approx(0.7));
    CHECK(find(4.0, true).configurations == 2);
    CHECK(find(4.0, false).macro_f1 == doctest::Approx(0.35));
    // c off baseline is excluded from the ratio view.
    CHECK(find(1.0, true).macro_f1 == doctest::Approx(0.5));
    CHECK(find(1.0, true).configurations == 1);
    CHECK(find(0.5, true).macro_f1 == doctest::Approx(0.2));
    CHECK(ratios.size() == 6);
  }

  TEST_CASE("small sweep end to end") {
    SyntheticSpec spec;
    spec.group_size = 12;
    spec.p_in = 0.4;
    spec.p_out = 0.05;
    auto s = generate_synthetic(spec);
    SweepGrid grid;
    grid.p_values = {0.5, 1};
    grid.q_values = {1, 2};
    grid.c_values = {2, 3};
    grid.d_values = {4};
    grid.baseline_c = 2;
    SweepOptions opts;
    opts.walks_per_node = 2;
    opts.max_length = 10;
    opts.epochs = 1;
    auto result = run_sweep(s.named.graph, s.labels, grid, opts);
    const auto configs = enumerate_grid(grid).size();
    CHECK(configs == 4);
    CHECK(result.rows.size() == configs * opts.classifiers.size());
    CHECK(result.classes == std::vector<std::string>{"g0", "g1"});

    opts.workers = 3;
    auto parallel = run_sweep(s.named.graph, s.labels, grid, opts);
    REQUIRE(parallel.rows.size() == result.rows.size());
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
      CHECK(parallel.rows[i].test_macro_f1 == result.rows[i].test_macro_f1);
      CHECK(parallel.rows[i].config == result.rows[i].config);
    }

    std::ostringstream out, ratio;
    write_sweep_csv(result, out);
    write_ratio_csv(result, ratio);
    std::istringstream lines(out.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header == "p,q,c,d,classifier,split,macro_f1,pq_ratio");
    std::size_t n = 0;
    for (std::string line; std::getline(lines, line);) ++n;
    CHECK(n == 2 * result.rows.size());
    CHECK(ratio.str().rfind("d,classifier,split,pq_ratio,macro_f1,configurations\n", 0) == 0);

    opts.classifiers.clear();
    CHECK_THROWS_AS(run_sweep(s.named.graph, s.labels, grid, opts), std::invalid_argument);
  }
}
