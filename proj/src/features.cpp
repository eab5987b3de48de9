#include "rne/features.hpp"

#include <ostream>
#include <sstream>

namespace rne {

std::string_view to_string(EdgeOperator op) {
  switch (op) {
    case EdgeOperator::concat: return "concat";
    case EdgeOperator::mean: return "mean";
    case EdgeOperator::hadamard: return "hadamard";
    case EdgeOperator::abs_diff: return "abs-diff";
  }
  return "unknown";
}

EdgeOperator parse_edge_operator(std::string_view name) {
  for (auto op : {EdgeOperator::concat, EdgeOperator::mean, EdgeOperator::hadamard, EdgeOperator::abs_diff}) {
    if (to_string(op) == name) return op;
  }
  throw std::invalid_argument("unknown edge operator '" + std::string(name) + "'");
}

void write_feature_csv(const EdgeFeatureSet<double>& features, std::span<const EdgeRecord> edges,
                       const NodeIndex& nodes, std::ostream& out) {
  std::ostringstream buffer;
  buffer.precision(9);
  buffer << "source,target";
  for (Eigen::Index c = 0; c < features.rows.cols(); ++c) buffer << ",f" << c;
  buffer << '\n';
  for (std::size_t i = 0; i < edges.size(); ++i) {
    buffer << nodes.name(edges[i].source) << ',' << nodes.name(edges[i].target);
    for (Eigen::Index c = 0; c < features.rows.cols(); ++c) buffer << ',' << features.rows(static_cast<Eigen::Index>(i), c);
    buffer << '\n';
  }
  out << buffer.str();
}

}  // namespace rne
