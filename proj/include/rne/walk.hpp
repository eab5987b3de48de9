#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rne/graph.hpp"
#include "rne/ingest.hpp"
#include "rne/random.hpp"

namespace rne {

/// How the distance between the previous node and a candidate is measured in
/// the second-order bias. `directed`: distance 1 iff prev -> x exists.
/// `undirected`: distance 1 iff an edge exists in either direction.
enum class DistanceMode { directed, undirected };

struct WalkConfig {
  std::size_t walks_per_node = 10;  // r
  std::size_t max_length = 80;      // l, counted in nodes
  double p = 1.0;                   // return parameter
  double q = 1.0;                   // in-out parameter
  std::uint64_t seed = 1;
  DistanceMode distance = DistanceMode::directed;

  /// Throws std::invalid_argument unless r >= 1, l >= 1, p > 0 and q > 0.
  void validate() const;
};

using Walk = std::vector<NodeId>;

struct WalkCorpus {
  std::vector<Walk> walks;
  WalkConfig config;
  std::size_t node_count = 0;
};

/// Unnormalized second-order weights for every out-edge slot of `curr`:
/// 1/p when the candidate is `prev`, 1 when it is adjacent to `prev`, 1/q
/// otherwise. Parallel edges each get their own slot.
std::vector<double> transition_weights(const RoadGraph& g, NodeId prev, NodeId curr, double p,
                                       double q, DistanceMode mode = DistanceMode::directed);

/// Normalized transition_weights. Throws GraphError("no successors") when
/// `curr` is a dead-end.
std::vector<double> transition_distribution(const RoadGraph& g, NodeId prev, NodeId curr, double p,
                                            double q, DistanceMode mode = DistanceMode::directed);

/// Draws one biased step; returns the chosen slot in out_neighbors(curr).
/// `curr` must have at least one successor.
std::size_t sample_next_slot(const RoadGraph& g, NodeId prev, NodeId curr, double p, double q,
                             DistanceMode mode, Rng& rng);

/// First step uniform over out-edges, later steps biased. Stops at
/// max_length nodes or at the first dead-end.
Walk sample_walk(const RoadGraph& g, NodeId start, const WalkConfig& cfg, Rng& rng);

/// Stream used for walk `index` from `start`; independent of scheduling.
inline Rng walk_rng(std::uint64_t seed, NodeId start, std::size_t index) {
  return keyed_rng({seed, start, index});
}

/// r walks per node, ordered by (walk index, start node). Output does not
/// depend on `workers`.
WalkCorpus sample_corpus(const RoadGraph& g, const WalkConfig& cfg, unsigned workers = 1);

/// One walk per line, node names separated by single spaces.
void write_walks(const WalkCorpus& corpus, const NodeIndex& nodes, std::ostream& out);
/// Inverse of write_walks; unknown names raise ParseError. The returned
/// corpus carries a default config.
WalkCorpus read_walks(std::istream& in, const NodeIndex& nodes);

}  // namespace rne
