#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rne/graph.hpp"
#include "rne/random.hpp"

namespace rne::test {

inline RoadGraph make_graph(std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> edges) {
  std::vector<EdgeRecord> records;
  for (auto [u, v] : edges) records.push_back({u, v, std::nullopt});
  return RoadGraph::build(n, std::move(records));
}

// Each edge endpoint uniform; self-loops and parallel edges allowed.
inline std::vector<EdgeRecord> random_edges(Rng& rng, std::size_t n, std::size_t m) {
  std::vector<EdgeRecord> out;
  for (std::size_t i = 0; i < m; ++i) {
    out.push_back({static_cast<NodeId>(uniform_index(rng, n)), static_cast<NodeId>(uniform_index(rng, n)), std::nullopt});
  }
  return out;
}

// Reference biased-step distribution from a linear scan of the edge list.
inline std::vector<double> scan_transition(std::span<const EdgeRecord> edges, NodeId prev, NodeId curr, double p,
                                           double q) {
  auto edge_exists = [&](NodeId a, NodeId b) {
    for (const auto& e : edges) {
      if (e.source == a && e.target == b) return true;
    }
    return false;
  };
  std::vector<double> w;
  for (const auto& e : edges) {
    if (e.source != curr) continue;
    if (e.target == prev) w.push_back(1.0 / p);
    else if (edge_exists(prev, e.target)) w.push_back(1.0);
    else w.push_back(1.0 / q);
  }
  double z = 0.0;
  for (double x : w) z += x;
  for (double& x : w) x /= z;
  return w;
}

// Exhaustive enumeration over all ordered edge pairs (e1, e2) with target(e1) = source(e2).
inline std::optional<double> enumerate_homophily(std::span<const EdgeRecord> edges,
                                                 const std::map<EdgeId, std::string>& labels, const std::string& a,
                                                 bool unlabeled_counts = false) {
  std::size_t same = 0, z = 0;
  for (EdgeId e1 = 0; e1 < edges.size(); ++e1) {
    auto l1 = labels.find(e1);
    if (l1 == labels.end() || l1->second != a) continue;
    for (EdgeId e2 = 0; e2 < edges.size(); ++e2) {
      if (edges[e2].source != edges[e1].target) continue;
      auto l2 = labels.find(e2);
      if (l2 == labels.end()) {
        if (unlabeled_counts) ++z;
        continue;
      }
      ++z;
      same += l2->second == a;
    }
  }
  if (z == 0) return std::nullopt;
  return static_cast<double>(same) / static_cast<double>(z);
}

// Macro F1 from explicit tp/fp/fn counting.
inline double brute_macro_f1(const std::vector<int>& truth, const std::vector<int>& pred, int classes) {
  double sum = 0.0;
  for (int c = 0; c < classes; ++c) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      tp += truth[i] == c && pred[i] == c;
      fp += truth[i] != c && pred[i] == c;
      fn += truth[i] == c && pred[i] != c;
    }
    if (tp > 0) {
      const double precision = tp / (tp + fp), recall = tp / (tp + fn);
      sum += 2 * precision * recall / (precision + recall);
    }
  }
  return sum / classes;
}

}  // namespace rne::test
