#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace rne {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

/// A directed road segment. The label is a class token (road category,
/// speed limit, ...) and may be absent.
struct EdgeRecord {
  NodeId source = 0;
  NodeId target = 0;
  std::optional<std::string> label;
};

struct Neighbor {
  NodeId node;
  EdgeId edge;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Immutable directed multigraph. Intersections are nodes, road segments are
/// edges; parallel edges keep distinct ids. Safe for concurrent reads.
class RoadGraph {
 public:
  RoadGraph() = default;

  /// EdgeId is the position in `edges`. Throws GraphError naming the first
  /// record whose endpoint is >= node_count.
  static RoadGraph build(std::size_t node_count, std::vector<EdgeRecord> edges);

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }

  const EdgeRecord& edge(EdgeId e) const { return edges_[e]; }
  std::span<const EdgeRecord> edges() const { return edges_; }

  /// Out-edges of v in EdgeId order.
  std::span<const Neighbor> out_neighbors(NodeId v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t out_degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  /// True iff at least one directed edge u -> v exists.
  bool has_edge(NodeId u, NodeId v) const { return edge_index_.contains(pair_key(u, v)); }

 private:
  static std::uint64_t pair_key(NodeId u, NodeId v) {
    return (static_cast<std::uint64_t>(u) << 32) | v;
  }

  std::size_t node_count_ = 0;
  std::vector<EdgeRecord> edges_;
  // CSR layout: out-edges of v are adjacency_[offsets_[v] .. offsets_[v+1]).
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
  std::unordered_set<std::uint64_t> edge_index_;
};

/// Partition of the nodes by weak connectivity. Each component is sorted and
/// components are ordered by their smallest node.
std::vector<std::vector<NodeId>> weakly_connected_components(const RoadGraph& g);

}  // namespace rne
