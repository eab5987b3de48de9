#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rne/graph.hpp"

namespace rne {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Bidirectional mapping between node names in files and dense NodeIds.
/// Ids are assigned in first-seen order.
class NodeIndex {
 public:
  NodeId intern(std::string_view name);
  std::optional<NodeId> find(std::string_view name) const;
  const std::string& name(NodeId id) const { return names_[id]; }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> ids_;
};

struct NamedGraph {
  RoadGraph graph;
  NodeIndex nodes;
};

/// Partial map from edge to class token for one labeling task.
struct LabelTable {
  std::string task;
  std::map<EdgeId, std::string> labels;

  std::size_t size() const { return labels.size(); }
  const std::string* find(EdgeId e) const {
    auto it = labels.find(e);
    return it == labels.end() ? nullptr : &it->second;
  }
  /// Distinct class tokens in lexicographic order.
  std::vector<std::string> classes() const;
};

/// Edge list: one `<source>\t<target>` per directed edge. `#` lines are
/// comments except for the directives `#nodes <count>` (at most once, before
/// any data) and `#node <name>`, which declares a node that may be isolated.
NamedGraph parse_edge_list(std::istream& in);
void write_edge_list(const NamedGraph& g, std::ostream& out);

/// Label file: `#task <name>` header, then `<source>\t<target>\t<ordinal>\t<label>`
/// where ordinal counts parallel source->target edges in file order from 0.
LabelTable parse_labels(std::istream& in, const NamedGraph& g);
void write_labels(const LabelTable& labels, const NamedGraph& g, std::ostream& out);

struct MergeResult {
  LabelTable table;
  std::size_t conflicts = 0;
};

/// Union of both tables; on a key present in both, the overlay label wins.
/// A conflict is a shared key whose labels differ.
MergeResult merge_labels(const LabelTable& base, const LabelTable& overlay);

/// Labels carried on the edge records themselves.
LabelTable labels_from_records(const RoadGraph& g, std::string task);

enum class SyntheticKind { grid, communities, islands };
enum class LabelRule {
  source_group,  // label = community of the source node
  connector,     // "local" inside a community, "connector" across communities
  axis,          // grid only: "horizontal" / "vertical"
};

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::communities;
  std::size_t rows = 3;
  std::size_t cols = 3;
  std::size_t groups = 2;
  std::size_t group_size = 10;
  double p_in = 0.1;
  double p_out = 0.01;
  LabelRule rule = LabelRule::source_group;
  std::uint64_t seed = 1;
};

struct SyntheticGraph {
  NamedGraph named;
  LabelTable labels;
  std::vector<std::size_t> group;  // per node; all zero for grids
};

/// Deterministic for a fixed spec. For communities, ordered pairs (u, v) with
/// u != v are visited row-major; each consumes one draw x = (mt19937_64() >> 11)
/// * 2^-53 from an engine seeded with `seed`, and the edge exists iff x < p,
/// with p = p_in inside a group and p_out across. Node i belongs to group
/// i / group_size and is named "n<i>".
SyntheticGraph generate_synthetic(const SyntheticSpec& spec);

}  // namespace rne
