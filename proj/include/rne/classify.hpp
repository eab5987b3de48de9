#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rne/embedding.hpp"
#include "rne/features.hpp"
#include "rne/metrics.hpp"

namespace rne {

/// Feature rows paired with class ids; `classes[id]` is the token, sorted
/// lexicographically so that id order is token order.
struct LabeledDataset {
  RowMatrix<double> features;
  std::vector<ClassId> labels;
  std::vector<std::string> classes;
  std::vector<EdgeId> edges;  // source edge of each row, when known

  std::size_t size() const { return labels.size(); }
  std::size_t class_count() const { return classes.size(); }
  std::vector<std::size_t> class_counts() const;
  LabeledDataset subset(std::span<const std::size_t> rows) const;
};

/// One row per labeled edge, in EdgeId order.
LabeledDataset labeled_dataset(const RowMatrix<double>& node_vectors, const RoadGraph& g, const LabelTable& labels,
                               EdgeOperator op = EdgeOperator::concat);

struct DataSplit {
  LabeledDataset train, test;
  std::vector<std::size_t> train_rows, test_rows;  // ascending
};

/// Uniform split without replacement; |train| = floor(fraction * n + 1/2).
/// `stratified` applies the same rule within each class.
DataSplit split(const LabeledDataset& ds, double fraction, std::uint64_t seed, bool stratified = false);

/// Appends uniform with-replacement copies of each minority class's rows until
/// every present class has the majority count. Original rows come first.
LabeledDataset oversample_to_majority(const LabeledDataset& train, std::uint64_t seed);

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::vector<ClassId> predict(const RowMatrix<double>& rows) const = 0;
  virtual std::string_view name() const = 0;
};

enum class ClassifierKind { logreg, forest, most_frequent, empirical };
std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(std::string_view name);

// ---- one-vs-rest logistic regression ----

struct LogRegParams {
  double l2 = 1e-4;
  std::size_t max_epochs = 200;
  double tolerance = 1e-7;  // relative loss change that counts as a plateau
};

/// Mean binary cross-entropy of sigma(X w + b) against y in {0,1}, plus
/// (l2/2)|w|^2. `coef` holds w followed by the bias b.
double logistic_loss(const RowMatrix<double>& x, const Eigen::VectorXd& y, const Eigen::VectorXd& coef, double l2);
Eigen::VectorXd logistic_gradient(const RowMatrix<double>& x, const Eigen::VectorXd& y, const Eigen::VectorXd& coef,
                                  double l2);

class LogisticOneVsRest final : public Classifier {
 public:
  static LogisticOneVsRest fit(const LabeledDataset& train, const LogRegParams& params = {});
  std::vector<ClassId> predict(const RowMatrix<double>& rows) const override;
  std::string_view name() const override { return "logreg"; }

  /// One row per class: weights then bias.
  const Eigen::MatrixXd& coefficients() const { return coef_; }
  /// Raw per-class scores X w + b (monotone in the class probability).
  Eigen::MatrixXd scores(const RowMatrix<double>& rows) const;

 private:
  Eigen::MatrixXd coef_;
};

// ---- random forest ----

struct ForestParams {
  std::size_t trees = 10;
  std::size_t min_samples_split = 2;
  std::size_t max_features = 0;  // 0: floor(sqrt(f)), at least 1
};

class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1, right = -1;
    ClassId label = 0;
  };

  /// Grows on `sample` (rows of x, repeats allowed) until nodes are pure or
  /// smaller than min_samples_split; Gini splits at midpoints between
  /// distinct values.
  static DecisionTree fit(const RowMatrix<double>& x, std::span<const ClassId> y, std::size_t classes,
                          std::vector<std::size_t> sample, const ForestParams& params, Rng& rng);
  ClassId predict_row(const Eigen::Ref<const RowVector<double>>& row) const;
  std::span<const Node> nodes() const { return nodes_; }

 private:
  std::vector<Node> nodes_;
};

class RandomForest final : public Classifier {
 public:
  /// Each tree sees a bootstrap sample of size n.
  static RandomForest fit(const LabeledDataset& train, std::uint64_t seed, const ForestParams& params = {});
  std::vector<ClassId> predict(const RowMatrix<double>& rows) const override;
  std::string_view name() const override { return "forest"; }
  std::span<const DecisionTree> trees() const { return trees_; }

 private:
  std::vector<DecisionTree> trees_;
  std::size_t classes_ = 0;
};

// ---- baselines ----

class MostFrequent final : public Classifier {
 public:
  static MostFrequent fit(const LabeledDataset& train);
  std::vector<ClassId> predict(const RowMatrix<double>& rows) const override;
  std::string_view name() const override { return "most-frequent"; }
  ClassId label() const { return label_; }

 private:
  ClassId label_ = 0;
};

/// Draws each prediction from the training class frequencies. The draw
/// sequence restarts from `seed` on every predict call.
class EmpiricalSampler final : public Classifier {
 public:
  static EmpiricalSampler fit(const LabeledDataset& train, std::uint64_t seed);
  std::vector<ClassId> predict(const RowMatrix<double>& rows) const override;
  std::string_view name() const override { return "empirical"; }

 private:
  AliasTable table_;
  std::uint64_t seed_ = 0;
};

struct EvalOptions {
  double train_fraction = 0.5;
  bool stratified = false;
  EdgeOperator op = EdgeOperator::concat;
  LogRegParams logreg;
  ForestParams forest;
  std::uint64_t seed = 1;
};

std::unique_ptr<Classifier> fit_classifier(ClassifierKind kind, const LabeledDataset& train, const EvalOptions& opts);

struct ClassifierEvaluation {
  ClassifierKind kind;
  F1Report train;  // on the training partition before oversampling
  F1Report test;
  std::vector<ClassId> test_truth, test_pred;
};

struct Evaluation {
  std::vector<std::string> classes;
  std::size_t train_rows = 0, oversampled_rows = 0, test_rows = 0;
  std::vector<ClassifierEvaluation> results;
};

/// Split, oversample the training part, fit every classifier, score both parts.
/// The two baselines are fit on the training part as drawn, not oversampled.
Evaluation evaluate_classifiers(const LabeledDataset& ds, std::span<const ClassifierKind> kinds, const EvalOptions& opts);

struct PerClassRow {
  std::string label;
  std::optional<double> homophily;
  double f1 = 0.0;
};

struct PerClassReport {
  std::vector<PerClassRow> rows;  // homophily descending, undefined last
  std::optional<double> spearman;  // homophily vs F1 over defined classes
};

/// Throws std::invalid_argument when `classes` and the homophily report
/// disagree on the class set.
PerClassReport per_class_report(std::span<const ClassId> truth, std::span<const ClassId> pred,
                                std::span<const std::string> classes, const HomophilyReport& homophily);

/// `class,homophily,f1`.
void write_per_class_csv(const PerClassReport& report, std::ostream& out);

}  // namespace rne
