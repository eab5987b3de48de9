#include "rne/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "rne/features.hpp"

namespace rne {

void SweepGrid::validate() const {
  if (p_values.empty() || q_values.empty() || c_values.empty() || d_values.empty()) {
    throw std::invalid_argument("sweep grid needs at least one value per parameter");
  }
  for (double v : p_values) if (!(v > 0.0)) throw std::invalid_argument("p values must be > 0");
  for (double v : q_values) if (!(v > 0.0)) throw std::invalid_argument("q values must be > 0");
  for (auto v : c_values) if (v < 1) throw std::invalid_argument("c values must be >= 1");
  for (auto v : d_values) if (v < 1) throw std::invalid_argument("d values must be >= 1");
  if (!(baseline_p > 0.0) || !(baseline_q > 0.0) || baseline_c < 1) throw std::invalid_argument("invalid sweep baseline");
}

std::vector<SweepConfig> enumerate_grid(const SweepGrid& grid) {
  grid.validate();
  std::vector<SweepConfig> out;
  auto add = [&](SweepConfig cfg) {
    if (std::find(out.begin(), out.end(), cfg) == out.end()) out.push_back(cfg);
  };
  for (auto d : grid.d_values) {
    for (double p : grid.p_values) add({p, grid.baseline_q, grid.baseline_c, d});
    for (double q : grid.q_values) add({grid.baseline_p, q, grid.baseline_c, d});
    for (auto c : grid.c_values) add({grid.baseline_p, grid.baseline_q, c, d});
  }
  return out;
}

namespace {

template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < std::min<std::size_t>(workers, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) fn(i);
    });
  }
}

}  // namespace

SweepResult run_sweep(const RoadGraph& g, const LabelTable& labels, const SweepGrid& grid, const SweepOptions& opts) {
  if (opts.classifiers.empty()) throw std::invalid_argument("sweep needs at least one classifier");
  const auto configs = enumerate_grid(grid);

  std::vector<std::pair<double, double>> walk_keys;
  for (const auto& cfg : configs) {
    if (std::find(walk_keys.begin(), walk_keys.end(), std::pair{cfg.p, cfg.q}) == walk_keys.end()) {
      walk_keys.emplace_back(cfg.p, cfg.q);
    }
  }
  std::vector<WalkCorpus> corpora(walk_keys.size());
  parallel_for(walk_keys.size(), opts.workers, [&](std::size_t i) {
    WalkConfig wc;
    wc.walks_per_node = opts.walks_per_node;
    wc.max_length = opts.max_length;
    wc.p = walk_keys[i].first;
    wc.q = walk_keys[i].second;
    wc.seed = opts.seed;
    wc.distance = opts.distance;
    corpora[i] = sample_corpus(g, wc);
  });

  EvalOptions eval = opts.eval;
  eval.seed = opts.seed;
  SweepResult result;
  result.classes = labels.classes();
  std::vector<std::vector<SweepRow>> per_config(configs.size());
  parallel_for(configs.size(), opts.workers, [&](std::size_t i) {
    const auto& cfg = configs[i];
    const auto key = std::find(walk_keys.begin(), walk_keys.end(), std::pair{cfg.p, cfg.q}) - walk_keys.begin();
    EmbedConfig ec;
    ec.dim = cfg.d;
    ec.window = cfg.c;
    ec.epochs = opts.epochs;
    ec.negatives = opts.negatives;
    ec.initial_lr = opts.initial_lr;
    ec.final_lr = opts.final_lr;
    ec.seed = opts.seed;
    const auto embedding = train<double>(corpora[static_cast<std::size_t>(key)], ec);
    const auto ds = labeled_dataset(embedding.center, g, labels, eval.op);
    const auto evaluation = evaluate_classifiers(ds, opts.classifiers, eval);
    for (const auto& r : evaluation.results) {
      per_config[i].push_back({cfg, r.kind, r.train.macro, r.test.macro, r.test.per_class});
    }
  });
  for (auto& rows : per_config) {
    for (auto& row : rows) result.rows.push_back(std::move(row));
  }
  result.ratios = aggregate_ratios(result.rows, grid);
  return result;
}

std::vector<RatioRow> aggregate_ratios(std::span<const SweepRow> rows, const SweepGrid& grid) {
  // (d, classifier, test, ratio) -> (sum, count)
  std::map<std::tuple<std::size_t, int, bool, double>, std::pair<double, std::size_t>> groups;
  for (const auto& row : rows) {
    const auto& cfg = row.config;
    const bool on_pq_axes = cfg.c == grid.baseline_c && (cfg.p == grid.baseline_p || cfg.q == grid.baseline_q);
    if (!on_pq_axes) continue;
    for (bool test : {false, true}) {
      auto& acc = groups[{cfg.d, static_cast<int>(row.classifier), test, cfg.pq_ratio()}];
      acc.first += test ? row.test_macro_f1 : row.train_macro_f1;
      ++acc.second;
    }
  }
  std::vector<RatioRow> out;
  for (const auto& [key, acc] : groups) {
    const auto& [d, classifier, test, ratio] = key;
    out.push_back({d, static_cast<ClassifierKind>(classifier), test, ratio, acc.first / static_cast<double>(acc.second),
                   acc.second});
  }
  return out;
}

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
  const auto old_precision = out.precision(9);
  out << "p,q,c,d,classifier,split,macro_f1,pq_ratio\n";
  for (const auto& row : result.rows) {
    const auto& cfg = row.config;
    for (bool test : {false, true}) {
      out << cfg.p << ',' << cfg.q << ',' << cfg.c << ',' << cfg.d << ',' << to_string(row.classifier) << ','
          << (test ? "test" : "train") << ',' << (test ? row.test_macro_f1 : row.train_macro_f1) << ','
          << cfg.pq_ratio() << '\n';
    }
  }
  out.precision(old_precision);
}

void write_ratio_csv(const SweepResult& result, std::ostream& out) {
  const auto old_precision = out.precision(9);
  out << "d,classifier,split,pq_ratio,macro_f1,configurations\n";
  for (const auto& r : result.ratios) {
    out << r.d << ',' << to_string(r.classifier) << ',' << (r.test ? "test" : "train") << ',' << r.pq_ratio << ','
        << r.macro_f1 << ',' << r.configurations << '\n';
  }
  out.precision(old_precision);
}

}  // namespace rne
