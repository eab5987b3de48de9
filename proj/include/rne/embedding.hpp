#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rne/ingest.hpp"
#include "rne/walk.hpp"

namespace rne {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// Skip-gram parameters. `center` is the node embedding; `context` holds the
/// output-side weights and is only needed during training.
template <typename Scalar>
struct EmbeddingMatrix {
  RowMatrix<Scalar> center;
  RowMatrix<Scalar> context;

  Eigen::Index rows() const { return center.rows(); }
  Eigen::Index dim() const { return center.cols(); }
  bool all_finite() const { return center.allFinite() && context.allFinite(); }
};

struct ContextPair {
  NodeId center;
  NodeId context;
  friend bool operator==(const ContextPair&, const ContextPair&) = default;
};

/// (v_i, v_j) for every j != i with |i - j| <= window. Windows shrink at the
/// walk ends instead of being padded.
std::vector<ContextPair> context_pairs(std::span<const NodeId> walk, std::size_t window);
void append_context_pairs(std::span<const NodeId> walk, std::size_t window,
                          std::vector<ContextPair>& out);

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// log(1 + e^x) without overflow.
inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

// Returns softplus(s * z) and sets ds = d softplus(s * z) / dz, sharing one exp.
inline double softplus_with_slope(double z, double s, double& ds) {
  const double x = s * z;
  const double e = std::exp(-std::abs(x));
  const double sig = x >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);  // sigmoid(x)
  ds = s * sig;
  return std::max(x, 0.0) + std::log1p(e);
}

// dL/dz for the positive target (index 0) followed by each negative, plus the loss.
template <typename Scalar>
double sgns_terms(const EmbeddingMatrix<Scalar>& m, ContextPair pair, std::span<const NodeId> negatives,
                  std::vector<double>& dz) {
  const auto h = m.center.row(pair.center);
  dz.resize(1 + negatives.size());
  // loss term softplus(-z_pos) has slope -sigmoid(-z_pos) = sigmoid(z_pos) - 1
  double loss = softplus_with_slope(static_cast<double>(h.dot(m.context.row(pair.context))), -1.0, dz[0]);
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    loss += softplus_with_slope(static_cast<double>(h.dot(m.context.row(negatives[k]))), 1.0, dz[k + 1]);
  }
  return loss;
}

}  // namespace detail

/// Negative-sampling loss -log s(z_pos) - sum_k log s(-z_k), with
/// z = center(pair.center) . context(target).
template <typename Scalar>
double sgns_loss(const EmbeddingMatrix<Scalar>& m, ContextPair pair, std::span<const NodeId> negatives) {
  std::vector<double> dz;
  return detail::sgns_terms(m, pair, negatives, dz);
}

template <typename Scalar>
struct SgnsGradient {
  double loss = 0.0;
  RowVector<Scalar> center;  // d loss / d center(pair.center)
  // d loss / d context(node), one entry per target slot (duplicates not merged).
  std::vector<std::pair<NodeId, RowVector<Scalar>>> context;
};

template <typename Scalar>
SgnsGradient<Scalar> sgns_gradient(const EmbeddingMatrix<Scalar>& m, ContextPair pair,
                                   std::span<const NodeId> negatives) {
  std::vector<double> dz;
  SgnsGradient<Scalar> grad;
  grad.loss = detail::sgns_terms(m, pair, negatives, dz);
  const auto h = m.center.row(pair.center);
  grad.center = RowVector<Scalar>::Zero(m.dim());
  for (std::size_t j = 0; j < dz.size(); ++j) {
    const NodeId target = j == 0 ? pair.context : negatives[j - 1];
    const auto g = static_cast<Scalar>(dz[j]);
    grad.center += g * m.context.row(target);
    grad.context.emplace_back(target, g * h);
  }
  return grad;
}

/// One plain gradient step of sgns_loss at learning rate `lr`, touching only
/// the center row of pair.center and the context rows of the targets. All
/// gradients are taken at the pre-step parameters. Returns the pre-step loss.
template <typename Scalar>
double sgns_step(EmbeddingMatrix<Scalar>& m, ContextPair pair, std::span<const NodeId> negatives,
                 double lr, std::vector<double>& scratch, RowVector<Scalar>& center_grad) {
  const double loss = detail::sgns_terms(m, pair, negatives, scratch);
  if (!std::isfinite(loss)) throw TrainingError("non-finite skip-gram loss");
  auto h = m.center.row(pair.center);
  center_grad.setZero(m.dim());
  for (std::size_t j = 0; j < scratch.size(); ++j) {
    const NodeId target = j == 0 ? pair.context : negatives[j - 1];
    center_grad.noalias() += static_cast<Scalar>(scratch[j]) * m.context.row(target);
  }
  for (std::size_t j = 0; j < scratch.size(); ++j) {
    const NodeId target = j == 0 ? pair.context : negatives[j - 1];
    m.context.row(target).noalias() -= static_cast<Scalar>(lr * scratch[j]) * h;
  }
  h.noalias() -= static_cast<Scalar>(lr) * center_grad;
  return loss;
}

template <typename Scalar>
double sgns_step(EmbeddingMatrix<Scalar>& m, ContextPair pair, std::span<const NodeId> negatives, double lr) {
  std::vector<double> scratch;
  RowVector<Scalar> center_grad;
  return sgns_step(m, pair, negatives, lr, scratch, center_grad);
}

/// Walk-based softmax log-likelihood: for every walk position and every
/// context node u in its window, log softmax_u(center(v) . context(.)) over all
/// nodes, summed. Cost is O(|V|^2 d + pairs), so it is meant for small graphs.
template <typename Scalar>
double exact_objective(const WalkCorpus& corpus, const EmbeddingMatrix<Scalar>& m, std::size_t window) {
  const Eigen::MatrixXd center = m.center.template cast<double>();
  const Eigen::MatrixXd context = m.context.template cast<double>();
  const Eigen::MatrixXd scores = center * context.transpose();
  Eigen::VectorXd log_norm(scores.rows());
  for (Eigen::Index v = 0; v < scores.rows(); ++v) {
    const double top = scores.row(v).maxCoeff();
    log_norm(v) = top + std::log((scores.row(v).array() - top).exp().sum());
  }
  double total = 0.0;
  std::vector<ContextPair> pairs;
  for (const auto& walk : corpus.walks) {
    pairs.clear();
    append_context_pairs(walk, window, pairs);
    for (const auto& pr : pairs) total += scores(pr.center, pr.context) - log_norm(pr.center);
  }
  return total;
}

struct EmbedConfig {
  std::size_t dim = 128;
  std::size_t window = 10;  // context size c
  std::size_t epochs = 5;
  double initial_lr = 0.025;
  double final_lr = 0.0001;
  std::size_t negatives = 5;
  std::uint64_t seed = 1;
  // > 1 selects unsynchronized parallel updates; results are then not reproducible.
  unsigned workers = 1;

  void validate() const;
  /// Non-empty when 2c >= l, i.e. most windows would be truncated.
  std::optional<std::string> window_warning(std::size_t max_length) const;
};

struct TrainReport {
  std::size_t pairs_per_epoch = 0;
  std::size_t steps = 0;
  double mean_loss_last_epoch = 0.0;
  bool deterministic = true;
};

/// Center rows uniform in [-0.5/d, 0.5/d), context rows zero.
template <typename Scalar>
EmbeddingMatrix<Scalar> initialize_embedding(std::size_t rows, std::size_t dim, std::uint64_t seed);

/// Skip-gram with negative sampling over the corpus context pairs. Noise
/// distribution: corpus unigram counts raised to 3/4. Nodes never visited
/// keep their initial rows.
template <typename Scalar>
EmbeddingMatrix<Scalar> train(const WalkCorpus& corpus, const EmbedConfig& cfg,
                              TrainReport* report = nullptr);

extern template EmbeddingMatrix<float> initialize_embedding<float>(std::size_t, std::size_t, std::uint64_t);
extern template EmbeddingMatrix<double> initialize_embedding<double>(std::size_t, std::size_t, std::uint64_t);
extern template EmbeddingMatrix<float> train<float>(const WalkCorpus&, const EmbedConfig&, TrainReport*);
extern template EmbeddingMatrix<double> train<double>(const WalkCorpus&, const EmbedConfig&, TrainReport*);

/// Text format: `<rows> <d>` header, then `<name> <v1> ... <vd>` per row, 9
/// significant digits.
void write_embedding(const RowMatrix<double>& vectors, std::span<const std::string> names, std::ostream& out);

struct LoadedEmbedding {
  std::vector<std::string> names;
  RowMatrix<double> vectors;
};

/// Throws ParseError when the body disagrees with the header.
LoadedEmbedding read_embedding(std::istream& in);

/// Reorders rows into NodeId order; throws std::invalid_argument naming the
/// first node without a row.
RowMatrix<double> align_embedding(const LoadedEmbedding& loaded, const NodeIndex& nodes);

}  // namespace rne
