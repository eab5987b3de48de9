#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rne/graph.hpp"
#include "rne/ingest.hpp"

namespace rne {

using ClassId = int;

/// Whether a labeled edge followed by an unlabeled one enters the
/// normalization. The default leaves such pairs out entirely.
enum class UnlabeledSuccessors { exclude, count_as_mismatch };

struct ClassHomophily {
  std::string label;
  std::optional<double> homophily;  // empty when no qualifying pair exists
  std::size_t pair_count = 0;       // Z: adjacent pairs whose first edge has this class
  std::size_t frequency = 0;        // edges carrying this class
};

struct HomophilyReport {
  std::vector<ClassHomophily> classes;  // lexicographic by label
  std::optional<double> mean;           // over classes with defined homophily
  std::vector<std::string> undefined;

  const ClassHomophily* find(const std::string& label) const;
};

/// Fraction of adjacent edge pairs e1 = (u, v), e2 = (v, w) with label(e1) = a
/// whose successor e2 also has label a. Throws std::invalid_argument when `a`
/// labels no edge.
std::optional<double> class_homophily(const RoadGraph& g, const LabelTable& labels, const std::string& a,
                                      UnlabeledSuccessors policy = UnlabeledSuccessors::exclude);

HomophilyReport homophily_report(const RoadGraph& g, const LabelTable& labels,
                                 UnlabeledSuccessors policy = UnlabeledSuccessors::exclude);

/// Unweighted mean over the defined entries; throws if none is defined.
double mean_homophily(std::span<const std::optional<double>> per_class);

/// `class,homophily,pair_count,frequency`; undefined homophily is written as `NA`.
void write_homophily_csv(const HomophilyReport& report, std::ostream& out);

struct ConfusionMatrix {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;  // (truth, predicted)

  static ConfusionMatrix tally(std::span<const ClassId> truth, std::span<const ClassId> pred, std::size_t classes);
  std::int64_t total() const { return counts.sum(); }
};

struct F1Report {
  double macro = 0.0;
  std::vector<double> per_class;
};

/// Per-class F1 with 0 for classes that have no true positives, macro F1 as
/// the plain mean over all `classes`.
F1Report macro_f1(std::span<const ClassId> truth, std::span<const ClassId> pred, std::size_t classes);
F1Report f1_from_confusion(const ConfusionMatrix& cm);

/// Spearman rank correlation with average ranks for ties. Empty when fewer
/// than two points or when either side has no rank variance.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

}  // namespace rne
