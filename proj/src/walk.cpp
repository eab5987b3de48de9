#include "rne/walk.hpp"

#include <atomic>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rne {

void WalkConfig::validate() const {
  if (walks_per_node < 1) throw std::invalid_argument("walks per node (r) must be >= 1");
  if (max_length < 1) throw std::invalid_argument("walk length (l) must be >= 1");
  if (!(p > 0.0)) throw std::invalid_argument("return parameter p must be > 0");
  if (!(q > 0.0)) throw std::invalid_argument("in-out parameter q must be > 0");
}

namespace {

inline double bias(const RoadGraph& g, NodeId prev, NodeId candidate, double inv_p, double inv_q,
                   DistanceMode mode) {
  if (candidate == prev) return inv_p;
  if (g.has_edge(prev, candidate)) return 1.0;
  if (mode == DistanceMode::undirected && g.has_edge(candidate, prev)) return 1.0;
  return inv_q;
}

}  // namespace

std::vector<double> transition_weights(const RoadGraph& g, NodeId prev, NodeId curr, double p,
                                       double q, DistanceMode mode) {
  const auto successors = g.out_neighbors(curr);
  std::vector<double> weights;
  weights.reserve(successors.size());
  for (const auto& nb : successors) weights.push_back(bias(g, prev, nb.node, 1.0 / p, 1.0 / q, mode));
  return weights;
}

std::vector<double> transition_distribution(const RoadGraph& g, NodeId prev, NodeId curr, double p,
                                            double q, DistanceMode mode) {
  if (g.out_degree(curr) == 0) throw GraphError("node " + std::to_string(curr) + ": no successors");
  auto weights = transition_weights(g, prev, curr, p, q, mode);
  double total = 0.0;
  for (double w : weights) total += w;
  for (double& w : weights) w /= total;
  return weights;
}

std::size_t sample_next_slot(const RoadGraph& g, NodeId prev, NodeId curr, double p, double q,
                             DistanceMode mode, Rng& rng) {
  const auto successors = g.out_neighbors(curr);
  const double inv_p = 1.0 / p;
  const double inv_q = 1.0 / q;
  // Small fixed buffer covers road-network degrees; spill to the heap otherwise.
  constexpr std::size_t kInline = 32;
  double inline_weights[kInline];
  std::vector<double> heap_weights;
  double* weights = inline_weights;
  if (successors.size() > kInline) {
    heap_weights.resize(successors.size());
    weights = heap_weights.data();
  }
  double total = 0.0;
  for (std::size_t i = 0; i < successors.size(); ++i) {
    weights[i] = bias(g, prev, successors[i].node, inv_p, inv_q, mode);
    total += weights[i];
  }
  double target = uniform01(rng) * total;
  for (std::size_t i = 0; i + 1 < successors.size(); ++i) {
    if (target < weights[i]) return i;
    target -= weights[i];
  }
  return successors.size() - 1;
}

Walk sample_walk(const RoadGraph& g, NodeId start, const WalkConfig& cfg, Rng& rng) {
  Walk walk;
  walk.reserve(cfg.max_length);
  walk.push_back(start);
  if (cfg.max_length < 2 || g.out_degree(start) == 0) return walk;

  const auto first = g.out_neighbors(start);
  walk.push_back(first[uniform_index(rng, first.size())].node);
  while (walk.size() < cfg.max_length) {
    const NodeId curr = walk.back();
    if (g.out_degree(curr) == 0) break;
    const NodeId prev = walk[walk.size() - 2];
    auto slot = sample_next_slot(g, prev, curr, cfg.p, cfg.q, cfg.distance, rng);
    walk.push_back(g.out_neighbors(curr)[slot].node);
  }
  return walk;
}

WalkCorpus sample_corpus(const RoadGraph& g, const WalkConfig& cfg, unsigned workers) {
  cfg.validate();
  WalkCorpus corpus;
  corpus.config = cfg;
  corpus.node_count = g.node_count();
  const std::size_t n = g.node_count();
  const std::size_t total = cfg.walks_per_node * n;
  corpus.walks.resize(total);

  auto produce = [&](std::size_t slot) {
    const std::size_t index = slot / n;
    const auto start = static_cast<NodeId>(slot % n);
    auto rng = walk_rng(cfg.seed, start, index);
    corpus.walks[slot] = sample_walk(g, start, cfg, rng);
  };

  if (workers <= 1 || total < 2) {
    for (std::size_t slot = 0; slot < total; ++slot) produce(slot);
    return corpus;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t slot; (slot = next.fetch_add(1)) < total;) produce(slot);
    });
  }
  pool.clear();
  return corpus;
}

void write_walks(const WalkCorpus& corpus, const NodeIndex& nodes, std::ostream& out) {
  for (const auto& walk : corpus.walks) {
    for (std::size_t i = 0; i < walk.size(); ++i) {
      if (i) out << ' ';
      out << nodes.name(walk[i]);
    }
    out << '\n';
  }
}

WalkCorpus read_walks(std::istream& in, const NodeIndex& nodes) {
  WalkCorpus corpus;
  corpus.node_count = nodes.size();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream tokens(line);
    Walk walk;
    for (std::string name; tokens >> name;) {
      auto id = nodes.find(name);
      if (!id) throw ParseError(line_no, "unknown node '" + name + "' in walk");
      walk.push_back(*id);
    }
    if (walk.empty()) throw ParseError(line_no, "empty walk");
    corpus.walks.push_back(std::move(walk));
  }
  return corpus;
}

}  // namespace rne
