#include "rne/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace rne {

const ClassHomophily* HomophilyReport::find(const std::string& label) const {
  auto it = std::find_if(classes.begin(), classes.end(), [&](const auto& c) { return c.label == label; });
  return it == classes.end() ? nullptr : &*it;
}

namespace {

struct PairCounts {
  std::vector<std::size_t> same, total, frequency;
};

PairCounts count_pairs(const RoadGraph& g, const std::vector<ClassId>& edge_class, std::size_t classes,
                       UnlabeledSuccessors policy) {
  PairCounts counts{std::vector<std::size_t>(classes), std::vector<std::size_t>(classes),
                    std::vector<std::size_t>(classes)};
  for (EdgeId e1 = 0; e1 < g.edge_count(); ++e1) {
    const ClassId a = edge_class[e1];
    if (a < 0) continue;
    ++counts.frequency[a];
    for (const auto& next : g.out_neighbors(g.edge(e1).target)) {
      const ClassId b = edge_class[next.edge];
      if (b < 0 && policy == UnlabeledSuccessors::exclude) continue;
      ++counts.total[a];
      if (b == a) ++counts.same[a];
    }
  }
  return counts;
}

std::vector<ClassId> classify_edges(const RoadGraph& g, const LabelTable& labels,
                                    const std::vector<std::string>& classes) {
  std::vector<ClassId> edge_class(g.edge_count(), -1);
  for (const auto& [edge, label] : labels.labels) {
    if (edge >= g.edge_count()) throw std::invalid_argument("label table references edge outside the graph");
    edge_class[edge] = static_cast<ClassId>(std::lower_bound(classes.begin(), classes.end(), label) - classes.begin());
  }
  return edge_class;
}

}  // namespace

std::optional<double> class_homophily(const RoadGraph& g, const LabelTable& labels, const std::string& a,
                                      UnlabeledSuccessors policy) {
  auto report = homophily_report(g, labels, policy);
  const auto* entry = report.find(a);
  if (!entry) throw std::invalid_argument("unknown class '" + a + "'");
  return entry->homophily;
}

HomophilyReport homophily_report(const RoadGraph& g, const LabelTable& labels, UnlabeledSuccessors policy) {
  const auto classes = labels.classes();
  const auto counts = count_pairs(g, classify_edges(g, labels, classes), classes.size(), policy);
  HomophilyReport report;
  std::vector<std::optional<double>> values;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    ClassHomophily entry{classes[c], std::nullopt, counts.total[c], counts.frequency[c]};
    if (counts.total[c] > 0) {
      entry.homophily = static_cast<double>(counts.same[c]) / static_cast<double>(counts.total[c]);
    } else {
      report.undefined.push_back(classes[c]);
    }
    values.push_back(entry.homophily);
    report.classes.push_back(std::move(entry));
  }
  if (report.undefined.size() < report.classes.size()) report.mean = mean_homophily(values);
  return report;
}

double mean_homophily(std::span<const std::optional<double>> per_class) {
  double sum = 0.0;
  std::size_t defined = 0;
  for (const auto& h : per_class) {
    if (h) sum += *h, ++defined;
  }
  if (defined == 0) throw std::invalid_argument("mean homophily needs at least one class with defined homophily");
  return sum / static_cast<double>(defined);
}

void write_homophily_csv(const HomophilyReport& report, std::ostream& out) {
  const auto old_precision = out.precision(9);
  out << "class,homophily,pair_count,frequency\n";
  for (const auto& c : report.classes) {
    out << c.label << ',';
    if (c.homophily) out << *c.homophily;
    else out << "NA";
    out << ',' << c.pair_count << ',' << c.frequency << '\n';
  }
  out.precision(old_precision);
}

ConfusionMatrix ConfusionMatrix::tally(std::span<const ClassId> truth, std::span<const ClassId> pred,
                                       std::size_t classes) {
  if (truth.size() != pred.size()) {
    throw std::invalid_argument("truth and prediction lengths differ (" + std::to_string(truth.size()) + " vs " +
                                std::to_string(pred.size()) + ")");
  }
  const auto k = static_cast<Eigen::Index>(classes);
  ConfusionMatrix cm{decltype(counts)::Zero(k, k)};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= k || pred[i] < 0 || pred[i] >= k) {
      throw std::invalid_argument("class id outside the class set at position " + std::to_string(i));
    }
    ++cm.counts(truth[i], pred[i]);
  }
  return cm;
}

F1Report f1_from_confusion(const ConfusionMatrix& cm) {
  F1Report report;
  const auto k = cm.counts.rows();
  report.per_class.resize(static_cast<std::size_t>(k));
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto tp = static_cast<double>(cm.counts(c, c));
    const auto fn = static_cast<double>(cm.counts.row(c).sum()) - tp;
    const auto fp = static_cast<double>(cm.counts.col(c).sum()) - tp;
    report.per_class[static_cast<std::size_t>(c)] = tp > 0.0 ? 2.0 * tp / (2.0 * tp + fp + fn) : 0.0;
  }
  if (k > 0) report.macro = std::accumulate(report.per_class.begin(), report.per_class.end(), 0.0) / static_cast<double>(k);
  return report;
}

F1Report macro_f1(std::span<const ClassId> truth, std::span<const ClassId> pred, std::size_t classes) {
  return f1_from_confusion(ConfusionMatrix::tally(truth, pred, classes));
}

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
  if (x.size() < 2) return std::nullopt;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const Eigen::Map<const Eigen::VectorXd> a(rx.data(), static_cast<Eigen::Index>(rx.size()));
  const Eigen::Map<const Eigen::VectorXd> b(ry.data(), static_cast<Eigen::Index>(ry.size()));
  const Eigen::VectorXd da = a.array() - a.mean();
  const Eigen::VectorXd db = b.array() - b.mean();
  const double denom = std::sqrt(da.squaredNorm() * db.squaredNorm());
  if (!(denom > 0.0)) return std::nullopt;
  return da.dot(db) / denom;
}

}  // namespace rne
