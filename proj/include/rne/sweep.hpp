#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rne/classify.hpp"
#include "rne/embedding.hpp"
#include "rne/walk.hpp"

namespace rne {

/// One-at-a-time parameter grid: for every d, vary p, then q, then c while
/// the other two stay at the baseline.
struct SweepGrid {
  std::vector<double> p_values{0.25, 0.5, 1, 2, 4};
  std::vector<double> q_values{0.25, 0.5, 1, 2, 4};
  std::vector<std::size_t> c_values{1, 5, 10, 15, 20, 25, 30};
  std::vector<std::size_t> d_values{64, 128, 256};
  double baseline_p = 1.0;
  double baseline_q = 1.0;
  std::size_t baseline_c = 10;

  void validate() const;
};

struct SweepConfig {
  double p, q;
  std::size_t c, d;
  double pq_ratio() const { return p / q; }
  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

/// Unique configurations in sweep order; the baseline appears once per d.
std::vector<SweepConfig> enumerate_grid(const SweepGrid& grid);

struct SweepOptions {
  std::size_t walks_per_node = 10;
  std::size_t max_length = 80;
  DistanceMode distance = DistanceMode::directed;
  std::size_t epochs = 5;
  std::size_t negatives = 5;
  double initial_lr = 0.025;
  double final_lr = 0.0001;
  std::vector<ClassifierKind> classifiers{ClassifierKind::logreg, ClassifierKind::forest,
                                          ClassifierKind::most_frequent, ClassifierKind::empirical};
  EvalOptions eval;
  std::uint64_t seed = 1;
  unsigned workers = 1;  // configurations evaluated concurrently
};

struct SweepRow {
  SweepConfig config;
  ClassifierKind classifier;
  double train_macro_f1 = 0.0;
  double test_macro_f1 = 0.0;
  std::vector<double> test_per_class_f1;
};

/// Mean macro F1 over the p- and q-sweep configurations (c at baseline) that
/// share a p/q ratio.
struct RatioRow {
  std::size_t d;
  ClassifierKind classifier;
  bool test;
  double pq_ratio;
  double macro_f1;
  std::size_t configurations;
};

struct SweepResult {
  std::vector<std::string> classes;
  std::vector<SweepRow> rows;  // (configuration, classifier) in enumeration order
  std::vector<RatioRow> ratios;
};

/// Walks are sampled once per distinct (p, q) and reused for every c and d.
/// Rows do not depend on `workers`.
SweepResult run_sweep(const RoadGraph& g, const LabelTable& labels, const SweepGrid& grid, const SweepOptions& opts);

std::vector<RatioRow> aggregate_ratios(std::span<const SweepRow> rows, const SweepGrid& grid);

/// `p,q,c,d,classifier,split,macro_f1,pq_ratio`, two lines per row.
void write_sweep_csv(const SweepResult& result, std::ostream& out);
/// `d,classifier,split,pq_ratio,macro_f1,configurations`.
void write_ratio_csv(const SweepResult& result, std::ostream& out);

}  // namespace rne
