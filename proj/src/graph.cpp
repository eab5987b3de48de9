#include "rne/graph.hpp"

#include <algorithm>
#include <numeric>

namespace rne {

RoadGraph RoadGraph::build(std::size_t node_count, std::vector<EdgeRecord> edges) {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& rec = edges[i];
    for (NodeId endpoint : {rec.source, rec.target}) {
      if (endpoint >= node_count) {
        throw GraphError("edge record " + std::to_string(i) + ": node " +
                         std::to_string(endpoint) + " out of range (node count " +
                         std::to_string(node_count) + ")");
      }
    }
  }

  RoadGraph g;
  g.node_count_ = node_count;
  g.offsets_.assign(node_count + 1, 0);
  for (const auto& rec : edges) ++g.offsets_[rec.source + 1];
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());

  g.adjacency_.resize(edges.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  g.edge_index_.reserve(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& rec = edges[e];
    g.adjacency_[cursor[rec.source]++] = {rec.target, static_cast<EdgeId>(e)};
    g.edge_index_.insert(pair_key(rec.source, rec.target));
  }
  g.edges_ = std::move(edges);
  return g;
}

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }

  std::vector<std::size_t> parent;
};

}  // namespace

std::vector<std::vector<NodeId>> weakly_connected_components(const RoadGraph& g) {
  DisjointSets sets(g.node_count());
  for (const auto& e : g.edges()) sets.unite(e.source, e.target);

  std::vector<std::vector<NodeId>> components;
  std::vector<std::size_t> slot(g.node_count(), SIZE_MAX);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    auto root = sets.find(v);
    if (slot[root] == SIZE_MAX) {
      slot[root] = components.size();
      components.emplace_back();
    }
    components[slot[root]].push_back(v);
  }
  return components;
}

}  // namespace rne
