#include "rne/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "rne/random.hpp"

namespace rne {

void append_context_pairs(std::span<const NodeId> walk, std::size_t window, std::vector<ContextPair>& out) {
  const std::size_t n = walk.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= window ? i - window : 0;
    const std::size_t hi = std::min(n - 1, i + window);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j != i) out.push_back({walk[i], walk[j]});
    }
  }
}

std::vector<ContextPair> context_pairs(std::span<const NodeId> walk, std::size_t window) {
  std::vector<ContextPair> out;
  append_context_pairs(walk, window, out);
  return out;
}

void EmbedConfig::validate() const {
  if (dim < 1) throw std::invalid_argument("embedding dimension d must be >= 1");
  if (window < 1) throw std::invalid_argument("context size c must be >= 1");
  if (negatives < 1) throw std::invalid_argument("negative sample count must be >= 1");
  if (!(initial_lr > 0.0) || !(final_lr >= 0.0)) throw std::invalid_argument("learning rates must be positive");
}

std::optional<std::string> EmbedConfig::window_warning(std::size_t max_length) const {
  if (2 * window < max_length) return std::nullopt;
  return "context size c=" + std::to_string(window) + " gives 2c >= l=" + std::to_string(max_length) +
         "; most context windows will be truncated";
}

template <typename Scalar>
EmbeddingMatrix<Scalar> initialize_embedding(std::size_t rows, std::size_t dim, std::uint64_t seed) {
  EmbeddingMatrix<Scalar> m;
  m.center.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
  m.context = RowMatrix<Scalar>::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
  auto rng = keyed_rng({seed, 0x696e6974});
  const double scale = 1.0 / static_cast<double>(dim);
  for (Eigen::Index r = 0; r < m.center.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.center.cols(); ++c) {
      m.center(r, c) = static_cast<Scalar>((uniform01(rng) - 0.5) * scale);
    }
  }
  return m;
}

namespace {

constexpr std::size_t kBlockPairs = std::size_t{1} << 22;

AliasTable noise_table(const WalkCorpus& corpus) {
  std::vector<double> counts(corpus.node_count, 0.0);
  for (const auto& walk : corpus.walks) {
    for (NodeId v : walk) {
      if (v >= corpus.node_count) throw std::invalid_argument("walk references node outside the graph");
      counts[v] += 1.0;
    }
  }
  for (double& c : counts) c = std::pow(c, 0.75);
  return AliasTable(counts);
}

// Shuffled walk order, cut into blocks of at most kBlockPairs pairs; each
// block is shuffled again at pair level. A corpus that fits in one block is a
// plain uniform shuffle of all pairs.
template <typename Fn>
void for_each_pair_block(const WalkCorpus& corpus, std::size_t window, Rng& rng, Fn&& fn) {
  std::vector<std::size_t> order(corpus.walks.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<ContextPair> block;
  for (auto w : order) {
    append_context_pairs(corpus.walks[w], window, block);
    if (block.size() >= kBlockPairs) {
      std::shuffle(block.begin(), block.end(), rng);
      fn(std::span<const ContextPair>(block));
      block.clear();
    }
  }
  if (!block.empty()) {
    std::shuffle(block.begin(), block.end(), rng);
    fn(std::span<const ContextPair>(block));
  }
}

std::size_t count_pairs(const WalkCorpus& corpus, std::size_t window) {
  std::size_t total = 0;
  for (const auto& walk : corpus.walks) {
    const std::size_t n = walk.size();
    for (std::size_t i = 0; i < n; ++i) {
      total += std::min(n - 1, i + window) - (i >= window ? i - window : 0);
    }
  }
  return total;
}

template <typename Scalar>
class PairTrainer {
 public:
  PairTrainer(EmbeddingMatrix<Scalar>& m, const AliasTable& noise, const EmbedConfig& cfg, std::size_t total_steps)
      : m_(m), noise_(noise), cfg_(cfg), total_steps_(static_cast<double>(std::max<std::size_t>(total_steps, 1))) {}

  // Processes pairs[begin, end) with stride; `step0` is the global step of pairs[0].
  double run(std::span<const ContextPair> pairs, std::size_t begin, std::size_t stride, std::size_t step0, Rng& rng) {
    std::vector<NodeId> negatives;
    std::vector<double> scratch;
    RowVector<Scalar> center_grad;
    double loss = 0.0;
    for (std::size_t i = begin; i < pairs.size(); i += stride) {
      const auto& pair = pairs[i];
      negatives.clear();
      for (std::size_t k = 0; k < cfg_.negatives; ++k) {
        auto neg = static_cast<NodeId>(noise_.sample(rng));
        if (neg != pair.context) negatives.push_back(neg);
      }
      const double progress = static_cast<double>(step0 + i) / total_steps_;
      const double lr = cfg_.initial_lr - (cfg_.initial_lr - cfg_.final_lr) * progress;
      loss += sgns_step(m_, pair, negatives, lr, scratch, center_grad);
    }
    return loss;
  }

 private:
  EmbeddingMatrix<Scalar>& m_;
  const AliasTable& noise_;
  const EmbedConfig& cfg_;
  double total_steps_;
};

}  // namespace

template <typename Scalar>
EmbeddingMatrix<Scalar> train(const WalkCorpus& corpus, const EmbedConfig& cfg, TrainReport* report) {
  cfg.validate();
  if (corpus.node_count == 0) throw std::invalid_argument("cannot train an embedding for an empty vocabulary");
  if (corpus.walks.empty()) throw std::invalid_argument("walk corpus is empty");

  auto m = initialize_embedding<Scalar>(corpus.node_count, cfg.dim, cfg.seed);
  const std::size_t pairs_per_epoch = count_pairs(corpus, cfg.window);
  TrainReport local;
  local.pairs_per_epoch = pairs_per_epoch;
  local.deterministic = cfg.workers <= 1;
  if (pairs_per_epoch == 0) {
    if (report) *report = local;
    return m;
  }

  const AliasTable noise = noise_table(corpus);
  const std::size_t total_steps = pairs_per_epoch * cfg.epochs;
  PairTrainer<Scalar> trainer(m, noise, cfg, total_steps);

  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto order_rng = keyed_rng({cfg.seed, epoch, 0x6f72646572});
    auto sample_rng = keyed_rng({cfg.seed, epoch, 0x6e6f697365});
    double epoch_loss = 0.0;
    std::size_t block_index = 0;
    for_each_pair_block(corpus, cfg.window, order_rng, [&](std::span<const ContextPair> block) {
      if (cfg.workers <= 1) {
        epoch_loss += trainer.run(block, 0, 1, step, sample_rng);
      } else {
        std::vector<double> losses(cfg.workers, 0.0);
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < cfg.workers; ++w) {
          pool.emplace_back([&, w] {
            auto rng = keyed_rng({cfg.seed, epoch, block_index, w});
            losses[w] = trainer.run(block, w, cfg.workers, step, rng);
          });
        }
        pool.clear();
        for (double l : losses) epoch_loss += l;
      }
      step += block.size();
      ++block_index;
    });
    local.mean_loss_last_epoch = epoch_loss / static_cast<double>(pairs_per_epoch);
  }
  local.steps = step;
  if (!m.all_finite()) throw TrainingError("embedding contains non-finite values after training");
  if (report) *report = local;
  return m;
}

template EmbeddingMatrix<float> initialize_embedding<float>(std::size_t, std::size_t, std::uint64_t);
template EmbeddingMatrix<double> initialize_embedding<double>(std::size_t, std::size_t, std::uint64_t);
template EmbeddingMatrix<float> train<float>(const WalkCorpus&, const EmbedConfig&, TrainReport*);
template EmbeddingMatrix<double> train<double>(const WalkCorpus&, const EmbedConfig&, TrainReport*);

void write_embedding(const RowMatrix<double>& vectors, std::span<const std::string> names, std::ostream& out) {
  if (static_cast<std::size_t>(vectors.rows()) != names.size()) {
    throw std::invalid_argument("embedding row count does not match the number of names");
  }
  std::ostringstream buffer;
  buffer.precision(9);
  buffer << vectors.rows() << ' ' << vectors.cols() << '\n';
  for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
    buffer << names[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) buffer << ' ' << vectors(r, c);
    buffer << '\n';
  }
  out << buffer.str();
}

LoadedEmbedding read_embedding(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing embedding header");
  std::istringstream header(line);
  long long rows = -1, dim = -1;
  std::string extra;
  if (!(header >> rows >> dim) || (header >> extra) || rows < 0 || dim < 1) {
    throw ParseError(1, "embedding header must be '<rows> <d>'");
  }
  LoadedEmbedding out;
  out.vectors.resize(rows, dim);
  out.names.reserve(static_cast<std::size_t>(rows));
  std::size_t line_no = 1;
  for (long long r = 0; r < rows; ++r) {
    ++line_no;
    if (!std::getline(in, line)) {
      throw ParseError(line_no, "header declares " + std::to_string(rows) + " rows but only " +
                                    std::to_string(r) + " present");
    }
    std::istringstream fields(line);
    std::string name;
    fields >> name;
    if (name.empty()) throw ParseError(line_no, "missing node name");
    for (long long c = 0; c < dim; ++c) {
      if (!(fields >> out.vectors(r, c))) throw ParseError(line_no, "expected " + std::to_string(dim) + " values");
    }
    if (fields >> extra) throw ParseError(line_no, "more than " + std::to_string(dim) + " values");
    out.names.push_back(std::move(name));
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw ParseError(line_no, "rows beyond the " + std::to_string(rows) + " declared in the header");
    }
  }
  return out;
}

RowMatrix<double> align_embedding(const LoadedEmbedding& loaded, const NodeIndex& nodes) {
  std::unordered_map<std::string, Eigen::Index> row_of;
  for (std::size_t i = 0; i < loaded.names.size(); ++i) row_of.emplace(loaded.names[i], static_cast<Eigen::Index>(i));
  RowMatrix<double> aligned(static_cast<Eigen::Index>(nodes.size()), loaded.vectors.cols());
  for (NodeId v = 0; v < nodes.size(); ++v) {
    auto it = row_of.find(nodes.name(v));
    if (it == row_of.end()) throw std::invalid_argument("node '" + nodes.name(v) + "' has no embedding row");
    aligned.row(v) = loaded.vectors.row(it->second);
  }
  return aligned;
}

}  // namespace rne
