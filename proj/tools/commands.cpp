#include "commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "manifest.hpp"
#include "rne/classify.hpp"
#include "rne/embedding.hpp"
#include "rne/features.hpp"
#include "rne/ingest.hpp"
#include "rne/metrics.hpp"
#include "rne/sweep.hpp"
#include "rne/walk.hpp"

namespace rne::cli {
namespace fs = std::filesystem;

namespace {

class CommandError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw CommandError("cannot open input file " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw CommandError("cannot open output file " + path.string());
  return out;
}

NamedGraph load_graph(const fs::path& path) {
  auto in = open_in(path);
  return parse_edge_list(in);
}

MergeResult load_labels(const std::vector<fs::path>& paths, const NamedGraph& g) {
  MergeResult merged;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    auto in = open_in(paths[i]);
    auto table = parse_labels(in, g);
    if (i == 0) {
      merged.table = std::move(table);
      continue;
    }
    auto next = merge_labels(merged.table, table);
    next.conflicts += merged.conflicts;
    merged = std::move(next);
  }
  return merged;
}

fs::path with_suffix(const fs::path& out, const std::string& suffix) {
  auto stem = out;
  if (stem.extension() == ".csv" || stem.extension() == ".tsv" || stem.extension() == ".txt") stem.replace_extension();
  stem += suffix;
  return stem;
}

std::vector<std::string> path_strings(const std::vector<fs::path>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) out.push_back(p.string());
  return out;
}

struct Context {
  std::vector<std::string> argv;
  std::ostream& out;
  std::ostream& err;

  RunManifest manifest(std::string command) const {
    RunManifest m;
    m.command = std::move(command);
    m.argv = argv;
    return m;
  }
};

// ---- synth ----

struct SynthOptions {
  std::string kind = "communities";
  std::size_t rows = 3, cols = 3, groups = 2, group_size = 10;
  double p_in = 0.1, p_out = 0.01;
  std::string rule = "source-group";
  std::uint64_t seed = 1;
  fs::path out;
};

void cmd_synth(const SynthOptions& o, const Context& ctx) {
  SyntheticSpec spec;
  static const std::map<std::string, SyntheticKind> kinds{
      {"grid", SyntheticKind::grid}, {"communities", SyntheticKind::communities}, {"islands", SyntheticKind::islands}};
  static const std::map<std::string, LabelRule> rules{
      {"source-group", LabelRule::source_group}, {"connector", LabelRule::connector}, {"axis", LabelRule::axis}};
  spec.kind = kinds.at(o.kind);
  spec.rule = spec.kind == SyntheticKind::grid ? LabelRule::axis : rules.at(o.rule);
  spec.rows = o.rows;
  spec.cols = o.cols;
  spec.groups = o.groups;
  spec.group_size = o.group_size;
  spec.p_in = o.p_in;
  spec.p_out = o.p_out;
  spec.seed = o.seed;
  const auto synthetic = generate_synthetic(spec);

  const auto graph_path = with_suffix(o.out, ".graph.tsv");
  const auto labels_path = with_suffix(o.out, ".labels.tsv");
  {
    auto out = open_out(graph_path);
    write_edge_list(synthetic.named, out);
    auto lab = open_out(labels_path);
    write_labels(synthetic.labels, synthetic.named, lab);
  }
  auto m = ctx.manifest("synth");
  m.parameters = {{"kind", o.kind}, {"rows", o.rows}, {"cols", o.cols}, {"groups", o.groups},
                  {"group_size", o.group_size}, {"p_in", o.p_in}, {"p_out", o.p_out},
                  {"rule", spec.rule == LabelRule::axis ? std::string("axis") : o.rule}, {"seed", o.seed}};
  m.outputs = {graph_path, labels_path};
  m.write(manifest_path_for(with_suffix(o.out, "")));
  ctx.out << "nodes " << synthetic.named.graph.node_count() << "\nedges " << synthetic.named.graph.edge_count()
          << "\nlabeled " << synthetic.labels.size() << '\n';
}

// ---- ingest ----

struct IngestOptions {
  fs::path graph;
  std::vector<fs::path> labels;
  fs::path out;
};

void cmd_ingest(const IngestOptions& o, const Context& ctx) {
  const auto g = load_graph(o.graph);
  const auto merged = load_labels(o.labels, g);
  const auto components = weakly_connected_components(g.graph);
  std::size_t dead_ends = 0;
  for (NodeId v = 0; v < g.graph.node_count(); ++v) dead_ends += g.graph.out_degree(v) == 0;

  auto m = ctx.manifest("ingest");
  m.inputs.push_back(o.graph);
  m.inputs.insert(m.inputs.end(), o.labels.begin(), o.labels.end());
  const auto graph_path = with_suffix(o.out, ".graph.tsv");
  {
    auto out = open_out(graph_path);
    write_edge_list(g, out);
  }
  m.outputs.push_back(graph_path);
  if (!o.labels.empty()) {
    const auto labels_path = with_suffix(o.out, ".labels.tsv");
    auto out = open_out(labels_path);
    write_labels(merged.table, g, out);
    out.close();
    m.outputs.push_back(labels_path);
  }
  m.parameters = {{"graph", o.graph.string()}, {"labels", path_strings(o.labels)}};
  m.write(manifest_path_for(with_suffix(o.out, "")));

  ctx.out << "nodes " << g.graph.node_count() << "\nedges " << g.graph.edge_count() << "\ncomponents "
          << components.size() << "\ndead_ends " << dead_ends << "\nlabeled " << merged.table.size()
          << "\nlabel_conflicts " << merged.conflicts << '\n';
}

// ---- walks ----

struct WalksOptions {
  fs::path graph;
  WalkConfig cfg;
  bool undirected = false;
  unsigned workers = 1;
  fs::path out;
};

void cmd_walks(WalksOptions o, const Context& ctx) {
  const auto g = load_graph(o.graph);
  o.cfg.distance = o.undirected ? DistanceMode::undirected : DistanceMode::directed;
  const auto corpus = sample_corpus(g.graph, o.cfg, o.workers);
  {
    auto out = open_out(o.out);
    write_walks(corpus, g.nodes, out);
  }
  auto m = ctx.manifest("walks");
  m.parameters = {{"p", o.cfg.p}, {"q", o.cfg.q}, {"r", o.cfg.walks_per_node}, {"l", o.cfg.max_length},
                  {"seed", o.cfg.seed}, {"distance", o.undirected ? "undirected" : "directed"}, {"workers", o.workers}};
  m.inputs = {o.graph};
  m.outputs = {o.out};
  m.write(manifest_path_for(o.out));
  ctx.out << "walks " << corpus.walks.size() << '\n';
}

// ---- embed ----

struct EmbedOptions {
  fs::path graph, walks;
  EmbedConfig cfg;
  fs::path out;
};

void cmd_embed(const EmbedOptions& o, const Context& ctx) {
  const auto g = load_graph(o.graph);
  auto in = open_in(o.walks);
  auto corpus = read_walks(in, g.nodes);
  std::size_t longest = 0;
  for (const auto& w : corpus.walks) longest = std::max(longest, w.size());
  if (auto warning = o.cfg.window_warning(longest)) ctx.err << "warning: " << *warning << '\n';

  TrainReport report;
  const auto m_emb = train<double>(corpus, o.cfg, &report);
  {
    auto out = open_out(o.out);
    write_embedding(m_emb.center, g.nodes.names(), out);
  }
  auto m = ctx.manifest("embed");
  m.deterministic = report.deterministic;
  m.parameters = {{"d", o.cfg.dim},
                  {"c", o.cfg.window},
                  {"epochs", o.cfg.epochs},
                  {"negatives", o.cfg.negatives},
                  {"initial_lr", o.cfg.initial_lr},
                  {"final_lr", o.cfg.final_lr},
                  {"seed", o.cfg.seed},
                  {"workers", o.cfg.workers},
                  {"noise_distribution", "unigram^0.75"},
                  {"pairs_per_epoch", report.pairs_per_epoch},
                  {"mean_loss_last_epoch", report.mean_loss_last_epoch}};
  m.inputs = {o.graph, o.walks};
  m.outputs = {o.out};
  m.write(manifest_path_for(o.out));
  ctx.out << "rows " << m_emb.rows() << "\ndim " << m_emb.dim() << "\npairs_per_epoch " << report.pairs_per_epoch
          << (report.deterministic ? "" : "\nmode non-deterministic") << '\n';
}

// ---- features ----

struct FeaturesOptions {
  fs::path graph, embedding;
  std::vector<fs::path> labels;
  std::string op = "concat";
  fs::path out;
};

RowMatrix<double> load_node_vectors(const fs::path& path, const NamedGraph& g) {
  auto in = open_in(path);
  return align_embedding(read_embedding(in), g.nodes);
}

void cmd_features(const FeaturesOptions& o, const Context& ctx) {
  const auto g = load_graph(o.graph);
  const auto vectors = load_node_vectors(o.embedding, g);
  std::vector<EdgeRecord> edges;
  if (o.labels.empty()) {
    edges.assign(g.graph.edges().begin(), g.graph.edges().end());
  } else {
    for (const auto& [edge, label] : load_labels(o.labels, g).table.labels) edges.push_back(g.graph.edge(edge));
  }
  const auto features = edge_features(vectors, edges, parse_edge_operator(o.op));
  {
    auto out = open_out(o.out);
    write_feature_csv(features, edges, g.nodes, out);
  }
  auto m = ctx.manifest("features");
  m.parameters = {{"op", o.op}, {"rows", edges.size()}, {"width", features.rows.cols()}};
  m.inputs = {o.graph, o.embedding};
  m.inputs.insert(m.inputs.end(), o.labels.begin(), o.labels.end());
  m.outputs = {o.out};
  m.write(manifest_path_for(o.out));
  ctx.out << "rows " << edges.size() << "\nwidth " << features.rows.cols() << '\n';
}

// ---- homophily ----

struct HomophilyOptions {
  fs::path graph;
  std::vector<fs::path> labels;
  bool count_unlabeled = false;
  fs::path out;
};

void cmd_homophily(const HomophilyOptions& o, const Context& ctx) {
  const auto g = load_graph(o.graph);
  const auto labels = load_labels(o.labels, g).table;
  const auto policy = o.count_unlabeled ? UnlabeledSuccessors::count_as_mismatch : UnlabeledSuccessors::exclude;
  const auto report = homophily_report(g.graph, labels, policy);
  {
    auto out = open_out(o.out);
    write_homophily_csv(report, out);
  }
  auto m = ctx.manifest("homophily");
  m.parameters = {{"task", labels.task},
                  {"unlabeled_successors", o.count_unlabeled ? "count-as-mismatch" : "exclude"}};
  if (report.mean) m.parameters["mean_homophily"] = *report.mean;
  m.inputs = {o.graph};
  m.inputs.insert(m.inputs.end(), o.labels.begin(), o.labels.end());
  m.outputs = {o.out};
  m.write(manifest_path_for(o.out));
  ctx.out << "classes " << report.classes.size() << "\nmean_homophily ";
  if (report.mean) ctx.out << *report.mean << '\n';
  else ctx.out << "NA\n";
}

// ---- evaluate / sweep shared ----

struct EvalFlags {
  std::vector<std::string> classifiers{"logreg", "forest", "most-frequent", "empirical"};
  double train_fraction = 0.5;
  bool stratified = false;
  std::string op = "concat";
  std::uint64_t seed = 1;
  std::size_t trees = 10;

  std::vector<ClassifierKind> kinds() const {
    std::vector<ClassifierKind> out;
    for (const auto& c : classifiers) out.push_back(parse_classifier_kind(c));
    if (out.empty()) throw CommandError("at least one --classifier is required");
    return out;
  }
  EvalOptions options() const {
    EvalOptions e;
    e.train_fraction = train_fraction;
    e.stratified = stratified;
    e.op = parse_edge_operator(op);
    e.seed = seed;
    e.forest.trees = trees;
    return e;
  }
  nlohmann::ordered_json json() const {
    return {{"classifiers", classifiers}, {"train_fraction", train_fraction}, {"stratified", stratified},
            {"op", op},                   {"seed", seed},                     {"forest_trees", trees},
            {"forest_split", "gini"},     {"forest_max_features", "sqrt"},    {"forest_bootstrap", "n"},
            {"logreg_l2", LogRegParams{}.l2}, {"logreg_max_epochs", LogRegParams{}.max_epochs}};
  }
};

void add_eval_flags(CLI::App& app, EvalFlags& f) {
  app.add_option("--classifier", f.classifiers, "Classifiers to train")
      ->check(CLI::IsMember({"logreg", "forest", "most-frequent", "empirical"}))
      ->capture_default_str();
  app.add_option("--train-fraction", f.train_fraction, "Fraction of labeled edges used for training")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_flag("--stratified", f.stratified, "Split within each class");
  app.add_option("--op", f.op, "Edge feature operator")
      ->check(CLI::IsMember({"concat", "mean", "hadamard", "abs-diff"}))
      ->capture_default_str();
  app.add_option("--seed", f.seed, "Seed for split, oversampling and classifiers")->capture_default_str();
  app.add_option("--trees", f.trees, "Random forest size")->check(CLI::PositiveNumber)->capture_default_str();
}

// ---- evaluate ----

struct EvaluateOptions {
  fs::path graph, embedding;
  std::vector<fs::path> labels;
  EvalFlags eval;
  fs::path out;
};

void cmd_evaluate(const EvaluateOptions& o, const Context& ctx) {
  const auto g = load_graph(o.graph);
  const auto labels = load_labels(o.labels, g).table;
  const auto vectors = load_node_vectors(o.embedding, g);
  const auto opts = o.eval.options();
  const auto ds = labeled_dataset(vectors, g.graph, labels, opts.op);
  const auto kinds = o.eval.kinds();
  const auto evaluation = evaluate_classifiers(ds, kinds, opts);
  const auto homophily = homophily_report(g.graph, labels);

  auto m = ctx.manifest("evaluate");
  {
    auto out = open_out(o.out);
    out.precision(9);
    out << "classifier,split,macro_f1\n";
    for (const auto& r : evaluation.results) {
      out << to_string(r.kind) << ",train," << r.train.macro << '\n';
      out << to_string(r.kind) << ",test," << r.test.macro << '\n';
    }
  }
  m.outputs.push_back(o.out);
  for (const auto& r : evaluation.results) {
    const auto path = with_suffix(o.out, "." + std::string(to_string(r.kind)) + ".classes.csv");
    auto out = open_out(path);
    write_per_class_csv(per_class_report(r.test_truth, r.test_pred, evaluation.classes, homophily), out);
    out.close();
    m.outputs.push_back(path);
    ctx.out << to_string(r.kind) << " train " << r.train.macro << " test " << r.test.macro << '\n';
  }
  m.parameters = o.eval.json();
  m.parameters["train_rows"] = evaluation.train_rows;
  m.parameters["oversampled_rows"] = evaluation.oversampled_rows;
  m.parameters["test_rows"] = evaluation.test_rows;
  m.inputs = {o.graph, o.embedding};
  m.inputs.insert(m.inputs.end(), o.labels.begin(), o.labels.end());
  m.write(manifest_path_for(o.out));
}

// ---- sweep ----

struct SweepCliOptions {
  fs::path graph;
  std::vector<fs::path> labels;
  SweepGrid grid;
  std::size_t r = 10, l = 80, epochs = 5;
  bool undirected = false;
  EvalFlags eval;
  unsigned workers = 1;
  fs::path out;
};

void cmd_sweep(const SweepCliOptions& o, const Context& ctx) {
  const auto g = load_graph(o.graph);
  const auto labels = load_labels(o.labels, g).table;
  SweepOptions opts;
  opts.walks_per_node = o.r;
  opts.max_length = o.l;
  opts.epochs = o.epochs;
  opts.distance = o.undirected ? DistanceMode::undirected : DistanceMode::directed;
  opts.classifiers = o.eval.kinds();
  opts.eval = o.eval.options();
  opts.seed = o.eval.seed;
  opts.workers = o.workers;
  const auto result = run_sweep(g.graph, labels, o.grid, opts);

  const auto ratio_path = with_suffix(o.out, ".ratio.csv");
  {
    auto out = open_out(o.out);
    write_sweep_csv(result, out);
    auto ratio = open_out(ratio_path);
    write_ratio_csv(result, ratio);
  }
  auto m = ctx.manifest("sweep");
  m.parameters = o.eval.json();
  m.parameters["grid"] = {{"p", o.grid.p_values}, {"q", o.grid.q_values}, {"c", o.grid.c_values},
                          {"d", o.grid.d_values}, {"baseline", {{"p", o.grid.baseline_p}, {"q", o.grid.baseline_q}, {"c", o.grid.baseline_c}}}};
  m.parameters["configurations"] = enumerate_grid(o.grid).size();
  m.parameters["r"] = o.r;
  m.parameters["l"] = o.l;
  m.parameters["epochs"] = o.epochs;
  m.parameters["workers"] = o.workers;
  m.inputs = {o.graph};
  m.inputs.insert(m.inputs.end(), o.labels.begin(), o.labels.end());
  m.outputs = {o.out, ratio_path};
  m.write(manifest_path_for(o.out));
  ctx.out << "configurations " << enumerate_grid(o.grid).size() << "\nrows " << result.rows.size() << '\n';
}

// ---- replay / verify ----

nlohmann::json load_manifest(const fs::path& path) {
  auto in = open_in(path);
  return nlohmann::json::parse(in);
}

int cmd_verify(const fs::path& manifest_path, const Context& ctx) {
  const auto j = load_manifest(manifest_path);
  int status = 0;
  for (const char* section : {"inputs", "outputs"}) {
    for (const auto& file : check_digests(j, section).changed) {
      ctx.err << section << " changed: " << file << '\n';
      status = 2;
    }
  }
  if (status == 0) ctx.out << "manifest verified\n";
  return status;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

namespace {

int cmd_replay(const fs::path& manifest_path, const Context& ctx) {
  const auto j = load_manifest(manifest_path);
  if (j.at("cwd").get<std::string>() != fs::current_path().string()) {
    ctx.err << "replay must run from " << j.at("cwd").get<std::string>() << '\n';
    return 2;
  }
  if (auto inputs = check_digests(j, "inputs"); !inputs.ok()) {
    for (const auto& f : inputs.changed) ctx.err << "input changed: " << f << '\n';
    return 2;
  }
  const auto argv = j.at("argv").get<std::vector<std::string>>();
  std::ostringstream sink;
  if (int status = run(argv, sink, ctx.err); status != 0) return status;
  auto outputs = check_digests(j, "outputs");
  for (const auto& f : outputs.changed) ctx.err << "output differs: " << f << '\n';
  if (!outputs.ok()) return 2;
  ctx.out << "replay reproduced " << j.at("outputs").size() << " output(s)\n";
  return 0;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Road network embedding toolkit: biased walks, skip-gram embeddings, homophily and edge classification",
               "rne"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic labeled graph");
  synth_cmd->add_option("--kind", synth.kind, "grid | communities | islands")
      ->check(CLI::IsMember({"grid", "communities", "islands"}))
      ->capture_default_str();
  synth_cmd->add_option("--rows", synth.rows)->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--cols", synth.cols)->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--groups", synth.groups)->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--group-size", synth.group_size)->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--p-in", synth.p_in)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  synth_cmd->add_option("--p-out", synth.p_out)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  synth_cmd->add_option("--rule", synth.rule, "source-group | connector (communities only)")
      ->check(CLI::IsMember({"source-group", "connector"}))
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output prefix")->required();

  IngestOptions ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate, merge and normalize a graph and its label files");
  ingest_cmd->add_option("--graph", ingest.graph)->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--labels", ingest.labels, "Label files; later files override earlier ones")
      ->check(CLI::ExistingFile);
  ingest_cmd->add_option("--out", ingest.out, "Output prefix")->required();

  WalksOptions walks;
  auto* walks_cmd = app.add_subcommand("walks", "Sample second-order biased random walks");
  walks_cmd->add_option("--graph", walks.graph)->required()->check(CLI::ExistingFile);
  walks_cmd->add_option("--p", walks.cfg.p, "Return parameter")->check(CLI::PositiveNumber)->capture_default_str();
  walks_cmd->add_option("--q", walks.cfg.q, "In-out parameter")->check(CLI::PositiveNumber)->capture_default_str();
  walks_cmd->add_option("--r", walks.cfg.walks_per_node, "Walks per node")->check(CLI::PositiveNumber)->capture_default_str();
  walks_cmd->add_option("--l", walks.cfg.max_length, "Maximum walk length")->check(CLI::PositiveNumber)->capture_default_str();
  walks_cmd->add_option("--seed", walks.cfg.seed)->capture_default_str();
  walks_cmd->add_flag("--undirected", walks.undirected, "Measure the return/in-out distance on the undirected graph");
  walks_cmd->add_option("--workers", walks.workers)->check(CLI::PositiveNumber)->capture_default_str();
  walks_cmd->add_option("--out", walks.out)->required();

  EmbedOptions embed;
  auto* embed_cmd = app.add_subcommand("embed", "Train skip-gram embeddings from a walk file");
  embed_cmd->add_option("--graph", embed.graph)->required()->check(CLI::ExistingFile);
  embed_cmd->add_option("--walks", embed.walks)->required()->check(CLI::ExistingFile);
  embed_cmd->add_option("--d", embed.cfg.dim, "Dimensions")->check(CLI::PositiveNumber)->capture_default_str();
  embed_cmd->add_option("--c", embed.cfg.window, "Context size")->check(CLI::PositiveNumber)->capture_default_str();
  embed_cmd->add_option("--epochs", embed.cfg.epochs)->check(CLI::NonNegativeNumber)->capture_default_str();
  embed_cmd->add_option("--negatives", embed.cfg.negatives)->check(CLI::PositiveNumber)->capture_default_str();
  embed_cmd->add_option("--lr", embed.cfg.initial_lr)->check(CLI::PositiveNumber)->capture_default_str();
  embed_cmd->add_option("--min-lr", embed.cfg.final_lr)->check(CLI::NonNegativeNumber)->capture_default_str();
  embed_cmd->add_option("--seed", embed.cfg.seed)->capture_default_str();
  embed_cmd->add_option("--workers", embed.cfg.workers, "More than 1 trains without synchronization (non-deterministic)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  embed_cmd->add_option("--out", embed.out)->required();

  FeaturesOptions features;
  auto* features_cmd = app.add_subcommand("features", "Write per-edge feature vectors as CSV");
  features_cmd->add_option("--graph", features.graph)->required()->check(CLI::ExistingFile);
  features_cmd->add_option("--embedding", features.embedding)->required()->check(CLI::ExistingFile);
  features_cmd->add_option("--labels", features.labels, "Restrict to labeled edges")->check(CLI::ExistingFile);
  features_cmd->add_option("--op", features.op)
      ->check(CLI::IsMember({"concat", "mean", "hadamard", "abs-diff"}))
      ->capture_default_str();
  features_cmd->add_option("--out", features.out)->required();

  HomophilyOptions homophily;
  auto* homophily_cmd = app.add_subcommand("homophily", "Per-class and mean edge homophily");
  homophily_cmd->add_option("--graph", homophily.graph)->required()->check(CLI::ExistingFile);
  homophily_cmd->add_option("--labels", homophily.labels)->required()->check(CLI::ExistingFile);
  homophily_cmd->add_flag("--count-unlabeled", homophily.count_unlabeled,
                          "Count pairs into unlabeled edges as mismatches");
  homophily_cmd->add_option("--out", homophily.out)->required();

  EvaluateOptions evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Split, oversample, train classifiers and score macro F1");
  evaluate_cmd->add_option("--graph", evaluate.graph)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--labels", evaluate.labels)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--embedding", evaluate.embedding)->required()->check(CLI::ExistingFile);
  add_eval_flags(*evaluate_cmd, evaluate.eval);
  evaluate_cmd->add_option("--out", evaluate.out)->required();

  SweepCliOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "One-at-a-time sweep over p, q, c for each d");
  sweep_cmd->add_option("--graph", sweep.graph)->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--labels", sweep.labels)->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--p-values", sweep.grid.p_values)->check(CLI::PositiveNumber)->capture_default_str();
  sweep_cmd->add_option("--q-values", sweep.grid.q_values)->check(CLI::PositiveNumber)->capture_default_str();
  sweep_cmd->add_option("--c-values", sweep.grid.c_values)->check(CLI::PositiveNumber)->capture_default_str();
  sweep_cmd->add_option("--d-values", sweep.grid.d_values)->check(CLI::PositiveNumber)->capture_default_str();
  sweep_cmd->add_option("--p", sweep.grid.baseline_p, "Baseline p")->check(CLI::PositiveNumber)->capture_default_str();
  sweep_cmd->add_option("--q", sweep.grid.baseline_q, "Baseline q")->check(CLI::PositiveNumber)->capture_default_str();
  sweep_cmd->add_option("--c", sweep.grid.baseline_c, "Baseline c")->check(CLI::PositiveNumber)->capture_default_str();
  sweep_cmd->add_option("--r", sweep.r)->check(CLI::PositiveNumber)->capture_default_str();
  sweep_cmd->add_option("--l", sweep.l)->check(CLI::PositiveNumber)->capture_default_str();
  sweep_cmd->add_option("--epochs", sweep.epochs)->check(CLI::NonNegativeNumber)->capture_default_str();
  sweep_cmd->add_flag("--undirected", sweep.undirected);
  add_eval_flags(*sweep_cmd, sweep.eval);
  sweep_cmd->add_option("--workers", sweep.workers, "Configurations trained concurrently")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out)->required();

  fs::path replay_manifest, verify_manifest;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a manifest and compare output digests");
  replay_cmd->add_option("--manifest", replay_manifest)->required()->check(CLI::ExistingFile);
  auto* verify_cmd = app.add_subcommand("verify", "Check recorded input and output digests");
  verify_cmd->add_option("--manifest", verify_manifest)->required()->check(CLI::ExistingFile);

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  const Context ctx{std::vector<std::string>(args.begin(), args.end()), out, err};
  try {
    if (*synth_cmd) cmd_synth(synth, ctx);
    else if (*ingest_cmd) cmd_ingest(ingest, ctx);
    else if (*walks_cmd) cmd_walks(walks, ctx);
    else if (*embed_cmd) cmd_embed(embed, ctx);
    else if (*features_cmd) cmd_features(features, ctx);
    else if (*homophily_cmd) cmd_homophily(homophily, ctx);
    else if (*evaluate_cmd) cmd_evaluate(evaluate, ctx);
    else if (*sweep_cmd) cmd_sweep(sweep, ctx);
    else if (*replay_cmd) return cmd_replay(replay_manifest, ctx);
    else if (*verify_cmd) return cmd_verify(verify_manifest, ctx);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace rne::cli
