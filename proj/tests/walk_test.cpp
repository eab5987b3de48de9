#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "rne/ingest.hpp"
#include "rne/walk.hpp"
#include "support.hpp"

using namespace rne;
using rne::test::make_graph;

namespace {

// prev=0, curr=1, successors of 1: {0, 2, 3}; 0->2 exists, 0->3 does not.
RoadGraph transition_example() { return make_graph(4, {{0, 1}, {1, 0}, {1, 2}, {1, 3}, {0, 2}}); }

bool edge_consistent(const RoadGraph& g, const Walk& w) {
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (!g.has_edge(w[i], w[i + 1])) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("walk") {
  TEST_CASE("hand evaluated transition example") {
    auto g = transition_example();
    auto w = transition_weights(g, 0, 1, 2.0, 0.5);
    REQUIRE(w.size() == 3);
    CHECK(w[0] == doctest::Approx(0.5));
    CHECK(w[1] == doctest::Approx(1.0));
    CHECK(w[2] == doctest::Approx(2.0));
    auto p = transition_distribution(g, 0, 1, 2.0, 0.5);
    CHECK(p[0] == doctest::Approx(1.0 / 7));
    CHECK(p[1] == doctest::Approx(2.0 / 7));
    CHECK(p[2] == doctest::Approx(4.0 / 7));
  }

  TEST_CASE("monte carlo second step on the transition example") {
    auto g = transition_example();
    Rng rng(42);
    std::vector<double> freq(3, 0.0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) freq[sample_next_slot(g, 0, 1, 2.0, 0.5, DistanceMode::directed, rng)] += 1.0;
    const double expect[] = {1.0 / 7, 2.0 / 7, 4.0 / 7};
    for (int k = 0; k < 3; ++k) CHECK(std::abs(freq[k] / draws - expect[k]) < 0.01);
  }

  TEST_CASE("p = q = 1 is uniform") {
    auto g = make_graph(5, {{0, 1}, {1, 0}, {1, 2}, {1, 3}, {1, 4}, {0, 2}});
    for (double v : transition_distribution(g, 0, 1, 1.0, 1.0)) CHECK(v == doctest::Approx(0.25));
  }

  TEST_CASE("parallel successors split mass evenly") {
    auto g = make_graph(3, {{0, 1}, {1, 2}, {1, 2}});
    auto p = transition_distribution(g, 0, 1, 1.0, 4.0);
    REQUIRE(p.size() == 2);
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));
  }

  TEST_CASE("undirected distance accepts the reverse edge") {
    // 2->0 exists but 0->2 does not.
    auto g = make_graph(3, {{0, 1}, {1, 2}, {2, 0}, {1, 0}});
    CHECK(transition_weights(g, 0, 1, 1.0, 4.0)[0] == doctest::Approx(0.25));
    CHECK(transition_weights(g, 0, 1, 1.0, 4.0, DistanceMode::undirected)[0] == doctest::Approx(1.0));
  }

  TEST_CASE("dead end has no successors") {
    auto g = make_graph(2, {{0, 1}});
    CHECK_THROWS_WITH_AS(transition_distribution(g, 0, 1, 1.0, 1.0), doctest::Contains("no successors"), GraphError);
  }

  TEST_CASE("distributions are valid on random graphs") {
    Rng rng(9);
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t n = 2 + uniform_index(rng, 18);
      auto g = RoadGraph::build(n, rne::test::random_edges(rng, n, 3 * n));
      for (const auto& e : g.edges()) {
        if (g.out_degree(e.target) == 0) continue;
        for (double p : {0.25, 1.0, 4.0}) {
          auto dist = transition_distribution(g, e.source, e.target, p, 1.0 / p);
          CHECK(std::all_of(dist.begin(), dist.end(), [](double x) { return x >= 0.0; }));
          CHECK(std::abs(std::accumulate(dist.begin(), dist.end(), 0.0) - 1.0) < 1e-12);
        }
      }
    }
  }

  TEST_CASE("sample_walk basics") {
    WalkConfig cfg;
    cfg.max_length = 5;
    Rng rng(1);
    CHECK(sample_walk(make_graph(2, {{0, 1}}), 1, cfg, rng) == Walk{1});
    cfg.p = 0.3;
    cfg.q = 7.0;
    CHECK(sample_walk(make_graph(2, {{0, 1}, {1, 0}}), 0, cfg, rng) == Walk{0, 1, 0, 1, 0});
    CHECK(sample_walk(make_graph(3, {{0, 1}, {1, 2}}), 0, cfg, rng) == Walk{0, 1, 2});
  }

  TEST_CASE("first step is uniform over out edges") {
    auto g = make_graph(3, {{0, 1}, {0, 2}, {0, 2}, {1, 0}, {2, 0}});
    WalkConfig cfg;
    cfg.max_length = 2;
    cfg.p = 0.1;
    std::vector<double> freq(3, 0.0);
    Rng rng(4);
    const int draws = 60000;
    for (int i = 0; i < draws; ++i) freq[sample_walk(g, 0, cfg, rng)[1]] += 1.0;
    CHECK(std::abs(freq[1] / draws - 1.0 / 3) < 0.01);
    CHECK(std::abs(freq[2] / draws - 2.0 / 3) < 0.01);
  }

  TEST_CASE("corpus count, determinism and seed sensitivity") {
    SyntheticSpec spec;
    spec.group_size = 5;
    spec.p_in = 0.6;
    spec.p_out = 0.1;
    const auto g = generate_synthetic(spec).named.graph;
    WalkConfig cfg;
    cfg.max_length = 20;
    cfg.p = 0.5;
    cfg.q = 2.0;
    auto a = sample_corpus(g, cfg);
    CHECK(a.walks.size() == 100);
    for (NodeId v = 0; v < 10; ++v) {
      CHECK(std::count_if(a.walks.begin(), a.walks.end(), [&](const Walk& w) { return w.front() == v; }) == 10);
    }
    for (const auto& w : a.walks) {
      CHECK(edge_consistent(g, w));
      CHECK(w.size() <= cfg.max_length);
    }
    CHECK(sample_corpus(g, cfg).walks == a.walks);
    CHECK(sample_corpus(g, cfg, 4).walks == a.walks);
    cfg.seed = 2;
    CHECK(sample_corpus(g, cfg).walks != a.walks);
  }

  TEST_CASE("config validation") {
    WalkConfig cfg;
    cfg.p = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.p = 1.0;
    cfg.q = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.q = 1.0;
    cfg.walks_per_node = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }

  TEST_CASE("walk file round trip") {
    std::istringstream graph_text("a b\nb c\nc a\nb a\n#node lone\n");
    auto g = parse_edge_list(graph_text);
    WalkConfig cfg;
    cfg.walks_per_node = 3;
    cfg.max_length = 7;
    auto corpus = sample_corpus(g.graph, cfg);
    std::stringstream buf;
    write_walks(corpus, g.nodes, buf);
    auto back = read_walks(buf, g.nodes);
    CHECK(back.walks == corpus.walks);
    CHECK(back.node_count == g.graph.node_count());
    std::istringstream bad("a b\nzz\n");
    CHECK_THROWS_AS(read_walks(bad, g.nodes), ParseError);
  }
}
