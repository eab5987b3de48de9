#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "rne/metrics.hpp"
#include "support.hpp"

using namespace rne;
using rne::test::make_graph;

namespace {

LabelTable table(std::map<EdgeId, std::string> labels) { return {"task", std::move(labels)}; }

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("single class cycle") {
    auto g = make_graph(3, {{0, 1}, {1, 2}, {2, 0}});
    auto t = table({{0, "a"}, {1, "a"}, {2, "a"}});
    CHECK(class_homophily(g, t, "a") == doctest::Approx(1.0));
    CHECK(homophily_report(g, t).mean == doctest::Approx(1.0));
  }

  TEST_CASE("worked example with an undefined class") {
    // u=0 v=1 w=2 x=3 y=4: e1=(u,v):a e2=(v,w):a e3=(v,x):b e4=(w,y):a
    auto g = make_graph(5, {{0, 1}, {1, 2}, {1, 3}, {2, 4}});
    auto t = table({{0, "a"}, {1, "a"}, {2, "b"}, {3, "a"}});
    CHECK(class_homophily(g, t, "a") == doctest::Approx(2.0 / 3));
    CHECK_FALSE(class_homophily(g, t, "b").has_value());
    auto report = homophily_report(g, t);
    CHECK(report.undefined == std::vector<std::string>{"b"});
    CHECK(report.mean == doctest::Approx(2.0 / 3));
    CHECK(report.find("a")->pair_count == 3);
    CHECK(report.find("a")->frequency == 3);
    CHECK_THROWS_AS(class_homophily(g, t, "c"), std::invalid_argument);
  }

  TEST_CASE("unlabeled successor policy") {
    auto g = make_graph(3, {{0, 1}, {1, 2}, {1, 0}});
    auto t = table({{0, "a"}, {1, "a"}});
    CHECK(class_homophily(g, t, "a") == doctest::Approx(1.0));
    CHECK(class_homophily(g, t, "a", UnlabeledSuccessors::count_as_mismatch) == doctest::Approx(0.5));
  }

  TEST_CASE("mean homophily") {
    std::vector<std::optional<double>> two{1.0, 0.5};
    CHECK(mean_homophily(two) == doctest::Approx(0.75));
    std::vector<std::optional<double>> partial{0.6, std::nullopt};
    CHECK(mean_homophily(partial) == doctest::Approx(0.6));
    std::vector<std::optional<double>> none{std::nullopt};
    CHECK_THROWS_AS(mean_homophily(none), std::invalid_argument);
  }

  TEST_CASE("homophily matches enumeration and ignores edge order") {
    Rng rng(17);
    for (int trial = 0; trial < 60; ++trial) {
      const std::size_t n = 2 + uniform_index(rng, 12);
      auto edges = rne::test::random_edges(rng, n, 1 + uniform_index(rng, 80));
      std::map<EdgeId, std::string> labels;
      for (EdgeId e = 0; e < edges.size(); ++e) {
        if (uniform01(rng) < 0.8) labels[e] = std::string(1, static_cast<char>('a' + uniform_index(rng, 3)));
      }
      if (labels.empty()) continue;
      auto g = RoadGraph::build(n, edges);
      auto t = table(labels);
      std::vector<EdgeId> perm(edges.size());
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<EdgeRecord> shuffled;
      std::map<EdgeId, std::string> shuffled_labels;
      for (EdgeId i = 0; i < perm.size(); ++i) {
        shuffled.push_back(edges[perm[i]]);
        if (labels.contains(perm[i])) shuffled_labels[i] = labels[perm[i]];
      }
      auto gs = RoadGraph::build(n, shuffled);
      for (const auto& a : t.classes()) {
        for (bool count : {false, true}) {
          const auto policy = count ? UnlabeledSuccessors::count_as_mismatch : UnlabeledSuccessors::exclude;
          const auto lib = class_homophily(g, t, a, policy);
          CHECK(lib == rne::test::enumerate_homophily(edges, labels, a, count));
          CHECK(class_homophily(gs, table(shuffled_labels), a, policy) == lib);
          if (lib) CHECK((*lib >= 0.0 && *lib <= 1.0));
        }
      }
    }
  }

  TEST_CASE("homophily csv") {
    auto g = make_graph(5, {{0, 1}, {1, 2}, {1, 3}, {2, 4}});
    std::ostringstream out;
    write_homophily_csv(homophily_report(g, table({{0, "a"}, {1, "a"}, {2, "b"}, {3, "a"}})), out);
    CHECK(out.str() == "class,homophily,pair_count,frequency\na,0.666666667,3,3\nb,NA,0,1\n");
  }

  TEST_CASE("macro f1 hand examples") {
    const std::vector<ClassId> truth{0, 0, 1, 1}, pred{0, 1, 1, 1};
    auto r = macro_f1(truth, pred, 2);
    CHECK(r.per_class[0] == doctest::Approx(2.0 / 3));
    CHECK(r.per_class[1] == doctest::Approx(0.8));
    CHECK(r.macro == doctest::Approx(11.0 / 15));
    CHECK(macro_f1(truth, truth, 2).macro == doctest::Approx(1.0));
    auto absent = macro_f1(truth, truth, 3);
    CHECK(absent.per_class[2] == 0.0);
    CHECK(absent.macro == doctest::Approx(2.0 / 3));
    CHECK_THROWS_AS(macro_f1(truth, std::vector<ClassId>{0, 1}, 2), std::invalid_argument);
    CHECK_THROWS_AS(macro_f1(truth, std::vector<ClassId>{0, 1, 2, 0}, 2), std::invalid_argument);
  }

  TEST_CASE("macro f1 agrees with brute force, relabeling and identity") {
    Rng rng(23);
    for (int trial = 0; trial < 1000; ++trial) {
      const int k = 1 + static_cast<int>(uniform_index(rng, 6));
      const std::size_t n = 1 + uniform_index(rng, 60);
      std::vector<ClassId> truth(n), pred(n);
      for (std::size_t i = 0; i < n; ++i) {
        truth[i] = static_cast<ClassId>(uniform_index(rng, k));
        pred[i] = uniform01(rng) < 0.5 ? truth[i] : static_cast<ClassId>(uniform_index(rng, k));
      }
      const auto r = macro_f1(truth, pred, k);
      CHECK(r.macro == doctest::Approx(rne::test::brute_macro_f1(truth, pred, k)).epsilon(1e-12));
      CHECK(ConfusionMatrix::tally(truth, pred, k).total() == static_cast<std::int64_t>(n));

      std::vector<ClassId> relabel(k);
      std::iota(relabel.begin(), relabel.end(), 0);
      std::shuffle(relabel.begin(), relabel.end(), rng);
      auto rt = truth, rp = pred;
      for (auto& c : rt) c = relabel[c];
      for (auto& c : rp) c = relabel[c];
      CHECK(macro_f1(rt, rp, k).macro == doctest::Approx(r.macro).epsilon(1e-12));

      // Macro F1 of 1 requires every class to appear, so compare against the present-class count.
      std::vector<bool> present(k, false);
      for (auto c : truth) present[c] = true;
      const bool all_present = std::all_of(present.begin(), present.end(), [](bool b) { return b; });
      if (all_present) CHECK((r.macro == doctest::Approx(1.0)) == (truth == pred));
    }
  }

  TEST_CASE("spearman") {
    std::vector<double> h{0.9, 0.3}, f{0.8, 0.2};
    CHECK(spearman(h, f) == doctest::Approx(1.0));
    std::vector<double> x{1, 2, 3, 4}, y{4, 3, 2, 1}, flat{1, 1, 1, 1};
    CHECK(spearman(x, y) == doctest::Approx(-1.0));
    CHECK_FALSE(spearman(x, flat).has_value());
    CHECK_FALSE(spearman(std::span(x).first(1), std::span(y).first(1)).has_value());
    std::vector<double> a{1, 2, 2, 3}, b{1, 3, 2, 4};
    // average ranks a = (1, 2.5, 2.5, 4), b = (1, 3, 2, 4)
    CHECK(spearman(a, b) == doctest::Approx(0.9486832980505138));
  }
}
