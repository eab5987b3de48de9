#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rne/embedding.hpp"
#include "rne/graph.hpp"

namespace rne {

enum class EdgeOperator { concat, mean, hadamard, abs_diff };

std::string_view to_string(EdgeOperator op);
/// Accepts "concat", "mean", "hadamard", "abs-diff".
EdgeOperator parse_edge_operator(std::string_view name);

template <typename Scalar>
struct EdgeFeatureSet {
  RowMatrix<Scalar> rows;  // row i belongs to edges[i]
  EdgeOperator op = EdgeOperator::concat;
};

inline Eigen::Index feature_width(EdgeOperator op, Eigen::Index dim) {
  return op == EdgeOperator::concat ? 2 * dim : dim;
}

/// Per-edge features from node vectors (one row per NodeId). Concatenation is
/// source first: [phi(source) | phi(target)].
template <typename Derived>
EdgeFeatureSet<typename Derived::Scalar> edge_features(const Eigen::MatrixBase<Derived>& nodes,
                                                       std::span<const EdgeRecord> edges,
                                                       EdgeOperator op = EdgeOperator::concat) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index d = nodes.cols();
  EdgeFeatureSet<Scalar> out;
  out.op = op;
  out.rows.resize(static_cast<Eigen::Index>(edges.size()), feature_width(op, d));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    for (NodeId v : {e.source, e.target}) {
      if (v >= nodes.rows()) throw std::invalid_argument("node " + std::to_string(v) + " has no embedding row");
    }
    const auto u = nodes.row(e.source);
    const auto v = nodes.row(e.target);
    auto row = out.rows.row(static_cast<Eigen::Index>(i));
    switch (op) {
      case EdgeOperator::concat:
        row.head(d) = u;
        row.tail(d) = v;
        break;
      case EdgeOperator::mean:
        row = (u + v) / Scalar(2);
        break;
      case EdgeOperator::hadamard:
        row = u.cwiseProduct(v);
        break;
      case EdgeOperator::abs_diff:
        row = (u - v).cwiseAbs();
        break;
    }
  }
  return out;
}

/// CSV with header `source,target,f0,...`; one row per edge.
void write_feature_csv(const EdgeFeatureSet<double>& features, std::span<const EdgeRecord> edges,
                       const NodeIndex& nodes, std::ostream& out);

}  // namespace rne
