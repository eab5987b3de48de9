#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "rne/ingest.hpp"
#include "rne/metrics.hpp"
#include "support.hpp"

using namespace rne;

namespace {

NamedGraph parse(const std::string& text) {
  std::istringstream in(text);
  return parse_edge_list(in);
}

LabelTable labels(const std::string& text, const NamedGraph& g) {
  std::istringstream in(text);
  return parse_labels(in, g);
}

std::multiset<std::pair<std::string, std::string>> edge_multiset(const NamedGraph& g) {
  std::multiset<std::pair<std::string, std::string>> out;
  for (const auto& e : g.graph.edges()) out.emplace(g.nodes.name(e.source), g.nodes.name(e.target));
  return out;
}

// Independent generator: same engine contract, counts only.
struct CommunityCounts {
  std::size_t total = 0, within = 0, across = 0;
};

CommunityCounts reference_communities(std::size_t k, std::size_t size, double p_in, double p_out, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  CommunityCounts c;
  const std::size_t n = k * size;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v) continue;
      const double x = static_cast<double>(engine() >> 11) / 9007199254740992.0;
      const bool same = u / size == v / size;
      if (x < (same ? p_in : p_out)) {
        ++c.total;
        ++(same ? c.within : c.across);
      }
    }
  }
  return c;
}

}  // namespace

TEST_SUITE("ingest") {
  TEST_CASE("two data lines") {
    auto g = parse("a b\nb a\n");
    CHECK(g.graph.node_count() == 2);
    CHECK(g.graph.edge_count() == 2);
    CHECK(g.nodes.name(0) == "a");
    CHECK(g.nodes.name(1) == "b");
  }

  TEST_CASE("one field is a parse error at that line") {
    try {
      parse("# comment\na b\na\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }

  TEST_CASE("header directives") {
    auto g = parse("#nodes 3\n#node z\na\tb\n");
    CHECK(g.graph.node_count() == 3);
    CHECK(g.graph.out_degree(*g.nodes.find("z")) == 0);
    CHECK_THROWS_AS(parse("#nodes 2\n#nodes 2\na b\n"), ParseError);
    CHECK_THROWS_AS(parse("a b\n#nodes 2\n"), ParseError);
    CHECK_THROWS_AS(parse("#nodes 5\na b\n"), ParseError);
  }

  TEST_CASE("3x3 grid text") {
    std::string text;
    auto id = [](int r, int c) { return "v" + std::to_string(r * 3 + c); };
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        if (c + 1 < 3) text += id(r, c) + "\t" + id(r, c + 1) + "\n" + id(r, c + 1) + "\t" + id(r, c) + "\n";
        if (r + 1 < 3) text += id(r, c) + "\t" + id(r + 1, c) + "\n" + id(r + 1, c) + "\t" + id(r, c) + "\n";
      }
    }
    auto g = parse(text);
    CHECK(g.graph.node_count() == 9);
    CHECK(g.graph.edge_count() == 24);
  }

  TEST_CASE("edge list round trip on random graphs") {
    Rng rng(3);
    for (int trial = 0; trial < 25; ++trial) {
      const std::size_t n = 1 + uniform_index(rng, 60);
      NamedGraph g;
      for (std::size_t i = 0; i < n; ++i) g.nodes.intern("node_" + std::to_string((i * 7919) % 1000));
      g.graph = RoadGraph::build(n, rne::test::random_edges(rng, n, uniform_index(rng, 500)));
      std::stringstream buf;
      write_edge_list(g, buf);
      auto back = parse_edge_list(buf);
      CHECK(back.graph.node_count() == n);
      CHECK(edge_multiset(back) == edge_multiset(g));
      CHECK(back.nodes.names() == g.nodes.names());
    }
  }

  TEST_CASE("label parsing") {
    auto g = parse("a b\nb a\na b\n");
    auto one = labels("#task speed\na\tb\t0\t50\n", g);
    CHECK(one.size() == 1);
    CHECK(*one.find(0) == "50");
    CHECK(labels("", g).size() == 0);
    CHECK(labels("#task speed\na\tb\t1\t80\n", g).find(2) != nullptr);
    CHECK_THROWS_AS(labels("#task speed\na\tb\t3\t80\n", g), ParseError);
    CHECK_THROWS_AS(labels("#task speed\na\tc\t0\t80\n", g), ParseError);
    CHECK_THROWS_AS(labels("#task speed\na\tb\t0\t80\na\tb\t0\t30\n", g), ParseError);
    CHECK_THROWS_AS(labels("a\tb\t0\t80\n", g), ParseError);
    CHECK_THROWS_AS(labels("#task x\n#task y\n", g), ParseError);
  }

  TEST_CASE("label round trip") {
    auto g = parse("a b\nb a\na b\nb c\n");
    LabelTable t{"category", {{0, "residential"}, {2, "motorway"}, {3, "residential"}}};
    std::stringstream buf;
    write_labels(t, g, buf);
    auto back = parse_labels(buf, g);
    CHECK(back.task == "category");
    CHECK(back.labels == t.labels);
    CHECK(back.classes() == std::vector<std::string>{"motorway", "residential"});
  }

  TEST_CASE("merge precedence and conflicts") {
    LabelTable base{"speed", {{0, "50"}}};
    auto disjoint = merge_labels(base, {"speed", {{1, "80"}}});
    CHECK(disjoint.table.labels == std::map<EdgeId, std::string>{{0, "50"}, {1, "80"}});
    CHECK(disjoint.conflicts == 0);
    auto clash = merge_labels(base, {"speed", {{0, "80"}}});
    CHECK(*clash.table.find(0) == "80");
    CHECK(clash.conflicts == 1);
    auto same = merge_labels(base, {"speed", {{0, "50"}}});
    CHECK(same.conflicts == 0);
    CHECK(merge_labels(base, {"speed", {}}).table.labels == base.labels);
    CHECK_THROWS_AS(merge_labels(base, {"category", {}}), std::invalid_argument);
  }

  TEST_CASE("merge is associative when conflict sets are disjoint") {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
      LabelTable t[3];
      for (auto& table : t) {
        table.task = "task";
        for (int i = 0; i < 6; ++i) table.labels[static_cast<EdgeId>(uniform_index(rng, 10))] = std::to_string(uniform_index(rng, 3));
      }
      auto left = merge_labels(merge_labels(t[0], t[1]).table, t[2]).table;
      auto right = merge_labels(t[0], merge_labels(t[1], t[2]).table).table;
      CHECK(left.labels == right.labels);
    }
  }

  TEST_CASE("grid generator") {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::grid;
    auto s = generate_synthetic(spec);
    CHECK(s.named.graph.node_count() == 9);
    CHECK(s.named.graph.edge_count() == 24);
    CHECK(s.labels.size() == 24);
    CHECK(s.labels.classes() == std::vector<std::string>{"horizontal", "vertical"});
  }

  TEST_CASE("complete communities without cross edges") {
    SyntheticSpec spec;
    spec.groups = 2;
    spec.group_size = 10;
    spec.p_in = 1.0;
    spec.p_out = 0.0;
    auto s = generate_synthetic(spec);
    CHECK(s.named.graph.edge_count() == 2 * 10 * 9);
    CHECK(weakly_connected_components(s.named.graph).size() == 2);
    auto report = homophily_report(s.named.graph, s.labels);
    REQUIRE(report.classes.size() == 2);
    for (const auto& c : report.classes) CHECK(c.homophily == doctest::Approx(1.0));
  }

  TEST_CASE("communities match a reference generator") {
    SyntheticSpec spec;
    spec.groups = 2;
    spec.group_size = 50;
    spec.p_in = 0.3;
    spec.p_out = 0.01;
    spec.seed = 7;
    auto s = generate_synthetic(spec);
    const auto ref = reference_communities(2, 50, 0.3, 0.01, 7);
    CHECK(s.named.graph.edge_count() == ref.total);
    std::size_t within = 0;
    for (const auto& e : s.named.graph.edges()) within += s.group[e.source] == s.group[e.target];
    CHECK(within == ref.within);
    CHECK(s.named.graph.edge_count() - within == ref.across);

    spec.rule = LabelRule::connector;
    auto c = generate_synthetic(spec);
    std::size_t connectors = 0;
    for (const auto& [e, label] : c.labels.labels) connectors += label == "connector";
    CHECK(connectors == ref.across);
  }

  TEST_CASE("generator is reproducible and seed sensitive") {
    SyntheticSpec spec;
    spec.group_size = 30;
    auto a = generate_synthetic(spec), b = generate_synthetic(spec);
    CHECK(edge_multiset(a.named) == edge_multiset(b.named));
    spec.seed = 2;
    CHECK(edge_multiset(generate_synthetic(spec).named) != edge_multiset(a.named));
  }

  TEST_CASE("islands have no cross edges") {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::islands;
    spec.groups = 3;
    spec.p_in = 0.5;
    spec.p_out = 0.9;
    auto s = generate_synthetic(spec);
    for (const auto& e : s.named.graph.edges()) CHECK(s.group[e.source] == s.group[e.target]);
  }

  TEST_CASE("generator rejects invalid specs") {
    SyntheticSpec spec;
    spec.p_in = 1.5;
    CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);
    spec.p_in = 0.5;
    spec.p_out = -0.1;
    CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);
    spec.p_out = 0.1;
    spec.group_size = 0;
    CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);
  }
}
