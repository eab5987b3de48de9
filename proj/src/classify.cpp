#include "rne/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace rne {

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(classes.size(), 0);
  for (ClassId c : labels) ++counts[static_cast<std::size_t>(c)];
  return counts;
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> rows) const {
  LabeledDataset out;
  out.classes = classes;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(labels[rows[i]]);
    if (!edges.empty()) out.edges.push_back(edges[rows[i]]);
  }
  return out;
}

LabeledDataset labeled_dataset(const RowMatrix<double>& node_vectors, const RoadGraph& g, const LabelTable& labels,
                               EdgeOperator op) {
  LabeledDataset ds;
  ds.classes = labels.classes();
  std::vector<EdgeRecord> records;
  for (const auto& [edge, label] : labels.labels) {
    if (edge >= g.edge_count()) throw std::invalid_argument("label references edge outside the graph");
    ds.edges.push_back(edge);
    records.push_back(g.edge(edge));
    ds.labels.push_back(static_cast<ClassId>(
        std::lower_bound(ds.classes.begin(), ds.classes.end(), label) - ds.classes.begin()));
  }
  ds.features = edge_features(node_vectors, records, op).rows;
  return ds;
}

namespace {

void fisher_yates(std::span<std::size_t> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[uniform_index(rng, i)]);
}

std::size_t round_half_up(double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); }

ClassId argmax_lowest(std::span<const std::size_t> votes) {
  return static_cast<ClassId>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

void require_finite(const RowMatrix<double>& x) {
  if (!x.allFinite()) throw std::invalid_argument("feature matrix contains non-finite values");
}

}  // namespace

DataSplit split(const LabeledDataset& ds, double fraction, std::uint64_t seed, bool stratified) {
  if (ds.size() < 2) throw std::invalid_argument("split needs at least 2 rows, got " + std::to_string(ds.size()));
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("split fraction must lie in (0, 1)");
  auto rng = keyed_rng({seed, 0x73706c6974});
  DataSplit out;
  auto take = [&](std::vector<std::size_t> pool) {
    fisher_yates(pool, rng);
    const std::size_t n_train = std::min(pool.size(), round_half_up(fraction * static_cast<double>(pool.size())));
    out.train_rows.insert(out.train_rows.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test_rows.insert(out.test_rows.end(), pool.begin() + static_cast<std::ptrdiff_t>(n_train), pool.end());
  };
  if (stratified) {
    std::vector<std::vector<std::size_t>> by_class(ds.class_count());
    for (std::size_t i = 0; i < ds.size(); ++i) by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
    for (auto& rows : by_class) take(std::move(rows));
  } else {
    std::vector<std::size_t> all(ds.size());
    std::iota(all.begin(), all.end(), 0);
    take(std::move(all));
  }
  std::sort(out.train_rows.begin(), out.train_rows.end());
  std::sort(out.test_rows.begin(), out.test_rows.end());
  out.train = ds.subset(out.train_rows);
  out.test = ds.subset(out.test_rows);
  return out;
}

LabeledDataset oversample_to_majority(const LabeledDataset& train, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> by_class(train.class_count());
  for (std::size_t i = 0; i < train.size(); ++i) by_class[static_cast<std::size_t>(train.labels[i])].push_back(i);
  std::size_t majority = 0;
  for (const auto& rows : by_class) majority = std::max(majority, rows.size());

  std::vector<std::size_t> rows(train.size());
  std::iota(rows.begin(), rows.end(), 0);
  auto rng = keyed_rng({seed, 0x6f76657273});
  for (const auto& members : by_class) {
    if (members.empty()) continue;
    for (std::size_t k = members.size(); k < majority; ++k) rows.push_back(members[uniform_index(rng, members.size())]);
  }
  return train.subset(rows);
}

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::logreg: return "logreg";
    case ClassifierKind::forest: return "forest";
    case ClassifierKind::most_frequent: return "most-frequent";
    case ClassifierKind::empirical: return "empirical";
  }
  return "unknown";
}

ClassifierKind parse_classifier_kind(std::string_view name) {
  for (auto k : {ClassifierKind::logreg, ClassifierKind::forest, ClassifierKind::most_frequent,
                 ClassifierKind::empirical}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown classifier '" + std::string(name) + "'");
}

// ---- logistic regression ----

namespace {

Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& z) {
  return z.unaryExpr([](double v) { return detail::sigmoid(v); });
}

Eigen::VectorXd linear_scores(const RowMatrix<double>& x, const Eigen::VectorXd& coef) {
  const auto f = x.cols();
  return (x * coef.head(f)).array() + coef(f);
}

}  // namespace

double logistic_loss(const RowMatrix<double>& x, const Eigen::VectorXd& y, const Eigen::VectorXd& coef, double l2) {
  const Eigen::ArrayXd z = linear_scores(x, coef);
  // -[y log s(z) + (1-y) log(1 - s(z))] = softplus(z) - y z
  const double data = (z.unaryExpr([](double v) { return detail::softplus(v); }) - y.array() * z).mean();
  return data + 0.5 * l2 * coef.head(x.cols()).squaredNorm();
}

Eigen::VectorXd logistic_gradient(const RowMatrix<double>& x, const Eigen::VectorXd& y, const Eigen::VectorXd& coef,
                                  double l2) {
  const auto f = x.cols();
  const auto n = static_cast<double>(x.rows());
  const Eigen::VectorXd residual = (sigmoid(linear_scores(x, coef)) - y.array()).matrix();
  Eigen::VectorXd grad(f + 1);
  grad.head(f) = x.transpose() * residual / n + l2 * coef.head(f);
  grad(f) = residual.sum() / n;
  return grad;
}

LogisticOneVsRest LogisticOneVsRest::fit(const LabeledDataset& train, const LogRegParams& params) {
  if (train.class_count() < 2) throw std::invalid_argument("logistic regression needs at least 2 classes");
  if (train.size() == 0) throw std::invalid_argument("logistic regression needs training rows");
  require_finite(train.features);
  const auto& x = train.features;
  const auto f = x.cols();
  const auto n = static_cast<double>(x.rows());

  // Step 1/L with L the Lipschitz constant of the gradient: 0.25 lambda_max([X 1]^T [X 1] / n) + l2.
  Eigen::MatrixXd gram(f + 1, f + 1);
  gram.topLeftCorner(f, f) = x.transpose() * x;
  gram.topRightCorner(f, 1) = x.colwise().sum().transpose();
  gram.bottomLeftCorner(1, f) = x.colwise().sum();
  gram(f, f) = n;
  gram /= n;
  const double lambda_max = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  const double step = 1.0 / (0.25 * lambda_max + params.l2);

  LogisticOneVsRest model;
  model.coef_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(train.class_count()), f + 1);
  for (std::size_t c = 0; c < train.class_count(); ++c) {
    Eigen::VectorXd y(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) y(i) = train.labels[static_cast<std::size_t>(i)] == static_cast<ClassId>(c);
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(f + 1);
    double loss = logistic_loss(x, y, coef, params.l2);
    for (std::size_t epoch = 0; epoch < params.max_epochs; ++epoch) {
      coef -= step * logistic_gradient(x, y, coef, params.l2);
      const double next = logistic_loss(x, y, coef, params.l2);
      const bool plateau = std::abs(loss - next) <= params.tolerance * std::max(1.0, std::abs(loss));
      loss = next;
      if (plateau) break;
    }
    model.coef_.row(static_cast<Eigen::Index>(c)) = coef.transpose();
  }
  return model;
}

Eigen::MatrixXd LogisticOneVsRest::scores(const RowMatrix<double>& rows) const {
  const auto f = coef_.cols() - 1;
  Eigen::MatrixXd s = rows * coef_.leftCols(f).transpose();
  s.rowwise() += coef_.col(f).transpose();
  return s;
}

std::vector<ClassId> LogisticOneVsRest::predict(const RowMatrix<double>& rows) const {
  require_finite(rows);
  const Eigen::MatrixXd s = scores(rows);
  std::vector<ClassId> out(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < s.cols(); ++c) {
      if (s(i, c) > s(i, best)) best = c;
    }
    out[static_cast<std::size_t>(i)] = static_cast<ClassId>(best);
  }
  return out;
}

// ---- decision trees ----

namespace {

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;  // n_left * gini_left + n_right * gini_right
};

class TreeBuilder {
 public:
  TreeBuilder(const RowMatrix<double>& x, std::span<const ClassId> y, std::size_t classes, const ForestParams& params,
              Rng& rng)
      : x_(x), y_(y), classes_(classes), params_(params), rng_(rng) {
    const auto f = static_cast<std::size_t>(x.cols());
    max_features_ = params.max_features ? std::min(params.max_features, f)
                                        : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(f))));
    features_.resize(f);
  }

  std::vector<DecisionTree::Node> build(std::vector<std::size_t> sample) {
    idx_ = std::move(sample);
    std::vector<DecisionTree::Node> nodes(1);
    struct Task { std::int32_t node; std::size_t begin, end; };
    std::vector<Task> stack{{0, 0, idx_.size()}};
    std::vector<std::size_t> counts(classes_);
    while (!stack.empty()) {
      const Task task = stack.back();
      stack.pop_back();
      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t i = task.begin; i < task.end; ++i) ++counts[static_cast<std::size_t>(y_[idx_[i]])];
      nodes[task.node].label = argmax_lowest(counts);
      const std::size_t size = task.end - task.begin;
      const bool pure = static_cast<std::size_t>(std::count(counts.begin(), counts.end(), 0)) + 1 >= classes_;
      if (size == 0 || pure || size < params_.min_samples_split) continue;

      const auto best = find_split(task.begin, task.end, counts);
      if (best.feature < 0) continue;
      auto mid = std::stable_partition(idx_.begin() + static_cast<std::ptrdiff_t>(task.begin),
                                       idx_.begin() + static_cast<std::ptrdiff_t>(task.end),
                                       [&](std::size_t r) { return x_(static_cast<Eigen::Index>(r), best.feature) <= best.threshold; });
      const auto split_at = static_cast<std::size_t>(mid - idx_.begin());
      const auto left = static_cast<std::int32_t>(nodes.size());
      nodes[task.node].feature = best.feature;
      nodes[task.node].threshold = best.threshold;
      nodes[task.node].left = left;
      nodes[task.node].right = left + 1;
      nodes.resize(nodes.size() + 2);
      stack.push_back({left + 1, split_at, task.end});
      stack.push_back({left, task.begin, split_at});
    }
    return nodes;
  }

 private:
  // Features are tried in random order; once max_features have been examined
  // the search stops at the first one that yields any valid split.
  SplitCandidate find_split(std::size_t begin, std::size_t end, const std::vector<std::size_t>& counts) {
    std::iota(features_.begin(), features_.end(), 0);
    fisher_yates(features_, rng_);
    SplitCandidate best;
    for (std::size_t k = 0; k < features_.size(); ++k) {
      if (k >= max_features_ && best.feature >= 0) break;
      evaluate_feature(static_cast<int>(features_[k]), begin, end, counts, best);
    }
    return best;
  }

  void evaluate_feature(int feature, std::size_t begin, std::size_t end, const std::vector<std::size_t>& counts,
                        SplitCandidate& best) {
    column_.clear();
    for (std::size_t i = begin; i < end; ++i) {
      column_.emplace_back(x_(static_cast<Eigen::Index>(idx_[i]), feature), y_[idx_[i]]);
    }
    std::sort(column_.begin(), column_.end());
    if (column_.front().first == column_.back().first) return;

    left_.assign(classes_, 0);
    right_.assign(counts.begin(), counts.end());
    double sq_left = 0.0, sq_right = 0.0;
    for (auto c : counts) sq_right += static_cast<double>(c) * static_cast<double>(c);
    const std::size_t n = column_.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto c = static_cast<std::size_t>(column_[i].second);
      sq_left += 2.0 * static_cast<double>(left_[c]) + 1.0;
      sq_right -= 2.0 * static_cast<double>(right_[c]) - 1.0;
      ++left_[c];
      --right_[c];
      const double lo = column_[i].first, hi = column_[i + 1].first;
      if (!(lo < hi)) continue;
      const auto nl = static_cast<double>(i + 1), nr = static_cast<double>(n - i - 1);
      const double impurity = (nl - sq_left / nl) + (nr - sq_right / nr);
      if (best.feature < 0 || impurity < best.impurity) {
        double threshold = 0.5 * (lo + hi);
        if (!(threshold < hi)) threshold = lo;
        best = {feature, threshold, impurity};
      }
    }
  }

  const RowMatrix<double>& x_;
  std::span<const ClassId> y_;
  std::size_t classes_;
  const ForestParams& params_;
  Rng& rng_;
  std::size_t max_features_ = 1;
  std::vector<std::size_t> idx_, features_, left_, right_;
  std::vector<std::pair<double, ClassId>> column_;
};

}  // namespace

DecisionTree DecisionTree::fit(const RowMatrix<double>& x, std::span<const ClassId> y, std::size_t classes,
                               std::vector<std::size_t> sample, const ForestParams& params, Rng& rng) {
  DecisionTree tree;
  tree.nodes_ = TreeBuilder(x, y, classes, params, rng).build(std::move(sample));
  return tree;
}

ClassId DecisionTree::predict_row(const Eigen::Ref<const RowVector<double>>& row) const {
  std::int32_t i = 0;
  while (nodes_[i].feature >= 0) i = row(nodes_[i].feature) <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
  return nodes_[i].label;
}

RandomForest RandomForest::fit(const LabeledDataset& train, std::uint64_t seed, const ForestParams& params) {
  if (train.class_count() < 1 || train.size() == 0) throw std::invalid_argument("random forest needs training rows");
  require_finite(train.features);
  RandomForest forest;
  forest.classes_ = train.class_count();
  const std::size_t n = train.size();
  for (std::size_t t = 0; t < params.trees; ++t) {
    auto rng = keyed_rng({seed, 0x74726565, t});
    std::vector<std::size_t> sample(n);
    for (auto& s : sample) s = uniform_index(rng, n);
    forest.trees_.push_back(DecisionTree::fit(train.features, train.labels, forest.classes_, std::move(sample), params, rng));
  }
  return forest;
}

std::vector<ClassId> RandomForest::predict(const RowMatrix<double>& rows) const {
  require_finite(rows);
  std::vector<ClassId> out(static_cast<std::size_t>(rows.rows()));
  std::vector<std::size_t> votes(classes_);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    std::fill(votes.begin(), votes.end(), 0);
    for (const auto& tree : trees_) ++votes[static_cast<std::size_t>(tree.predict_row(rows.row(i)))];
    out[static_cast<std::size_t>(i)] = argmax_lowest(votes);
  }
  return out;
}

// ---- baselines ----

MostFrequent MostFrequent::fit(const LabeledDataset& train) {
  if (train.size() == 0) throw std::invalid_argument("most-frequent baseline needs training rows");
  MostFrequent model;
  model.label_ = argmax_lowest(train.class_counts());
  return model;
}

std::vector<ClassId> MostFrequent::predict(const RowMatrix<double>& rows) const {
  return std::vector<ClassId>(static_cast<std::size_t>(rows.rows()), label_);
}

EmpiricalSampler EmpiricalSampler::fit(const LabeledDataset& train, std::uint64_t seed) {
  if (train.size() == 0) throw std::invalid_argument("empirical baseline needs training rows");
  const auto counts = train.class_counts();
  std::vector<double> weights(counts.begin(), counts.end());
  EmpiricalSampler model;
  model.table_ = AliasTable(weights);
  model.seed_ = seed;
  return model;
}

std::vector<ClassId> EmpiricalSampler::predict(const RowMatrix<double>& rows) const {
  auto rng = keyed_rng({seed_, 0x656d70});
  std::vector<ClassId> out(static_cast<std::size_t>(rows.rows()));
  for (auto& label : out) label = static_cast<ClassId>(table_.sample(rng));
  return out;
}

std::unique_ptr<Classifier> fit_classifier(ClassifierKind kind, const LabeledDataset& train, const EvalOptions& opts) {
  switch (kind) {
    case ClassifierKind::logreg:
      return std::make_unique<LogisticOneVsRest>(LogisticOneVsRest::fit(train, opts.logreg));
    case ClassifierKind::forest:
      return std::make_unique<RandomForest>(RandomForest::fit(train, opts.seed, opts.forest));
    case ClassifierKind::most_frequent:
      return std::make_unique<MostFrequent>(MostFrequent::fit(train));
    case ClassifierKind::empirical:
      return std::make_unique<EmpiricalSampler>(EmpiricalSampler::fit(train, opts.seed));
  }
  throw std::invalid_argument("unknown classifier kind");
}

Evaluation evaluate_classifiers(const LabeledDataset& ds, std::span<const ClassifierKind> kinds, const EvalOptions& opts) {
  if (kinds.empty()) throw std::invalid_argument("no classifiers requested");
  const auto parts = split(ds, opts.train_fraction, opts.seed, opts.stratified);
  const auto balanced = oversample_to_majority(parts.train, opts.seed);
  Evaluation eval;
  eval.classes = ds.classes;
  eval.train_rows = parts.train.size();
  eval.oversampled_rows = balanced.size();
  eval.test_rows = parts.test.size();
  for (auto kind : kinds) {
    // Baselines read label statistics, which oversampling would flatten.
    const bool baseline = kind == ClassifierKind::most_frequent || kind == ClassifierKind::empirical;
    auto model = fit_classifier(kind, baseline ? parts.train : balanced, opts);
    ClassifierEvaluation result{kind, {}, {}, parts.test.labels, model->predict(parts.test.features)};
    result.train = macro_f1(parts.train.labels, model->predict(parts.train.features), ds.class_count());
    result.test = macro_f1(result.test_truth, result.test_pred, ds.class_count());
    eval.results.push_back(std::move(result));
  }
  return eval;
}

PerClassReport per_class_report(std::span<const ClassId> truth, std::span<const ClassId> pred,
                                std::span<const std::string> classes, const HomophilyReport& homophily) {
  if (homophily.classes.size() != classes.size()) throw std::invalid_argument("class sets differ between predictions and homophily report");
  const auto f1 = macro_f1(truth, pred, classes.size());
  PerClassReport report;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto* h = homophily.find(classes[c]);
    if (!h) throw std::invalid_argument("class '" + classes[c] + "' missing from homophily report");
    report.rows.push_back({classes[c], h->homophily, f1.per_class[c]});
  }
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const PerClassRow& a, const PerClassRow& b) {
    if (a.homophily.has_value() != b.homophily.has_value()) return a.homophily.has_value();
    return a.homophily && *a.homophily > *b.homophily;
  });
  std::vector<double> hs, fs;
  for (const auto& row : report.rows) {
    if (row.homophily) hs.push_back(*row.homophily), fs.push_back(row.f1);
  }
  report.spearman = spearman(hs, fs);
  return report;
}

void write_per_class_csv(const PerClassReport& report, std::ostream& out) {
  const auto old_precision = out.precision(9);
  out << "class,homophily,f1\n";
  for (const auto& row : report.rows) {
    out << row.label << ',';
    if (row.homophily) out << *row.homophily;
    else out << "NA";
    out << ',' << row.f1 << '\n';
  }
  out.precision(old_precision);
}

}  // namespace rne
