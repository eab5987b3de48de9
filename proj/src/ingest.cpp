#include "rne/ingest.hpp"

#include <cctype>
#include <charconv>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace rne {

NodeId NodeIndex::intern(std::string_view name) {
  if (auto id = find(name)) return *id;
  auto id = static_cast<NodeId>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<NodeId> NodeIndex::find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> LabelTable::classes() const {
  std::set<std::string> unique;
  for (const auto& [edge, label] : labels) unique.insert(label);
  return {unique.begin(), unique.end()};
}

namespace {

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

template <typename T>
std::optional<T> parse_number(std::string_view text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

// The directive keyword is the first whitespace token after '#'.
std::pair<std::string_view, std::vector<std::string_view>> directive(std::string_view line) {
  auto fields = split_whitespace(line.substr(1));
  if (fields.empty()) return {{}, {}};
  auto keyword = fields.front();
  fields.erase(fields.begin());
  return {keyword, fields};
}

// (source, target) -> EdgeIds between them in EdgeId order.
std::map<std::pair<NodeId, NodeId>, std::vector<EdgeId>> parallel_groups(const RoadGraph& g) {
  std::map<std::pair<NodeId, NodeId>, std::vector<EdgeId>> groups;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto& rec = g.edge(e);
    groups[{rec.source, rec.target}].push_back(e);
  }
  return groups;
}

}  // namespace

NamedGraph parse_edge_list(std::istream& in) {
  NamedGraph result;
  std::vector<EdgeRecord> edges;
  std::optional<std::size_t> declared;
  bool seen_data = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (is_blank(line)) continue;
    if (line.front() == '#') {
      auto [keyword, args] = directive(line);
      if (keyword == "nodes") {
        if (declared) throw ParseError(line_no, "duplicate #nodes header");
        if (seen_data) throw ParseError(line_no, "#nodes header after edge data");
        std::optional<std::size_t> count;
        if (args.size() == 1) count = parse_number<std::size_t>(args[0]);
        if (!count) throw ParseError(line_no, "malformed #nodes header");
        declared = count;
      } else if (keyword == "node") {
        if (args.size() != 1) throw ParseError(line_no, "#node expects one name");
        if (result.nodes.find(args[0])) throw ParseError(line_no, "duplicate #node declaration");
        result.nodes.intern(args[0]);
      }
      continue;
    }
    auto fields = split_whitespace(line);
    if (fields.size() != 2) {
      throw ParseError(line_no, "expected 2 fields (source, target), got " +
                                    std::to_string(fields.size()));
    }
    seen_data = true;
    EdgeRecord rec;
    rec.source = result.nodes.intern(fields[0]);
    rec.target = result.nodes.intern(fields[1]);
    edges.push_back(std::move(rec));
  }
  if (declared && *declared != result.nodes.size()) {
    throw ParseError(line_no, "#nodes declares " + std::to_string(*declared) + " nodes but " +
                                  std::to_string(result.nodes.size()) + " were found");
  }
  result.graph = RoadGraph::build(result.nodes.size(), std::move(edges));
  return result;
}

void write_edge_list(const NamedGraph& g, std::ostream& out) {
  out << "#nodes " << g.graph.node_count() << '\n';
  for (const auto& name : g.nodes.names()) out << "#node " << name << '\n';
  for (const auto& e : g.graph.edges()) {
    out << g.nodes.name(e.source) << '\t' << g.nodes.name(e.target) << '\n';
  }
}

LabelTable parse_labels(std::istream& in, const NamedGraph& g) {
  const auto groups = parallel_groups(g.graph);
  LabelTable table;
  bool have_task = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (is_blank(line)) continue;
    if (line.front() == '#') {
      auto [keyword, args] = directive(line);
      if (keyword == "task") {
        if (have_task) throw ParseError(line_no, "duplicate #task header");
        if (args.size() != 1) throw ParseError(line_no, "#task expects one name");
        table.task = std::string(args[0]);
        have_task = true;
      }
      continue;
    }
    if (!have_task) throw ParseError(line_no, "missing #task header before label data");
    auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw ParseError(line_no, "expected 4 tab-separated fields, got " +
                                    std::to_string(fields.size()));
    }
    auto source = g.nodes.find(fields[0]);
    auto target = g.nodes.find(fields[1]);
    auto ordinal = parse_number<std::size_t>(fields[2]);
    if (!source || !target) throw ParseError(line_no, "unknown node in label key");
    if (!ordinal) throw ParseError(line_no, "malformed ordinal");
    auto it = groups.find({*source, *target});
    if (it == groups.end() || *ordinal >= it->second.size()) {
      throw ParseError(line_no, "no edge " + std::string(fields[0]) + " -> " +
                                    std::string(fields[1]) + " with ordinal " +
                                    std::string(fields[2]));
    }
    if (fields[3].empty()) throw ParseError(line_no, "empty label");
    auto [pos, inserted] = table.labels.emplace(it->second[*ordinal], std::string(fields[3]));
    if (!inserted) throw ParseError(line_no, "duplicate label key");
  }
  if (!have_task && line_no > 0) throw ParseError(line_no, "missing #task header");
  return table;
}

void write_labels(const LabelTable& labels, const NamedGraph& g, std::ostream& out) {
  out << "#task " << labels.task << '\n';
  // Ordinal of every edge among its parallel siblings.
  std::vector<std::size_t> ordinal(g.graph.edge_count());
  for (const auto& [pair, ids] : parallel_groups(g.graph)) {
    for (std::size_t i = 0; i < ids.size(); ++i) ordinal[ids[i]] = i;
  }
  for (const auto& [edge, label] : labels.labels) {
    const auto& rec = g.graph.edge(edge);
    out << g.nodes.name(rec.source) << '\t' << g.nodes.name(rec.target) << '\t' << ordinal[edge]
        << '\t' << label << '\n';
  }
}

MergeResult merge_labels(const LabelTable& base, const LabelTable& overlay) {
  if (base.task != overlay.task) {
    throw std::invalid_argument("cannot merge label tables for tasks '" + base.task + "' and '" +
                                overlay.task + "'");
  }
  MergeResult result{base, 0};
  for (const auto& [edge, label] : overlay.labels) {
    auto [it, inserted] = result.table.labels.try_emplace(edge, label);
    if (!inserted && it->second != label) {
      ++result.conflicts;
      it->second = label;
    }
  }
  return result;
}

LabelTable labels_from_records(const RoadGraph& g, std::string task) {
  LabelTable table{std::move(task), {}};
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (const auto& label = g.edge(e).label) table.labels.emplace(e, *label);
  }
  return table;
}

namespace {

SyntheticGraph make_grid(const SyntheticSpec& spec) {
  SyntheticGraph out;
  const auto id = [&](std::size_t r, std::size_t c) { return static_cast<NodeId>(r * spec.cols + c); };
  for (std::size_t i = 0; i < spec.rows * spec.cols; ++i) out.named.nodes.intern("n" + std::to_string(i));
  out.group.assign(spec.rows * spec.cols, 0);

  std::vector<EdgeRecord> edges;
  auto add_both = [&](NodeId a, NodeId b, const char* axis) {
    edges.push_back({a, b, std::string(axis)});
    edges.push_back({b, a, std::string(axis)});
  };
  for (std::size_t r = 0; r < spec.rows; ++r) {
    for (std::size_t c = 0; c < spec.cols; ++c) {
      if (c + 1 < spec.cols) add_both(id(r, c), id(r, c + 1), "horizontal");
      if (r + 1 < spec.rows) add_both(id(r, c), id(r + 1, c), "vertical");
    }
  }
  out.named.graph = RoadGraph::build(spec.rows * spec.cols, std::move(edges));
  out.labels = labels_from_records(out.named.graph, "axis");
  return out;
}

SyntheticGraph make_communities(const SyntheticSpec& spec, double p_out) {
  if (spec.rule == LabelRule::axis) throw std::invalid_argument("axis labels apply to grids only");
  const std::size_t n = spec.groups * spec.group_size;
  SyntheticGraph out;
  out.group.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.named.nodes.intern("n" + std::to_string(i));
    out.group[i] = i / spec.group_size;
  }

  std::mt19937_64 engine(spec.seed);
  std::vector<EdgeRecord> edges;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v) continue;
      const double x = static_cast<double>(engine() >> 11) * 0x1.0p-53;
      const bool same = out.group[u] == out.group[v];
      if (x >= (same ? spec.p_in : p_out)) continue;
      std::string label = spec.rule == LabelRule::source_group
                              ? "g" + std::to_string(out.group[u])
                              : (same ? "local" : "connector");
      edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), std::move(label)});
    }
  }
  out.named.graph = RoadGraph::build(n, std::move(edges));
  out.labels = labels_from_records(out.named.graph,
                                   spec.rule == LabelRule::source_group ? "group" : "connector");
  return out;
}

}  // namespace

SyntheticGraph generate_synthetic(const SyntheticSpec& spec) {
  switch (spec.kind) {
    case SyntheticKind::grid:
      if (spec.rows == 0 || spec.cols == 0) throw std::invalid_argument("grid sizes must be positive");
      return make_grid(spec);
    case SyntheticKind::communities:
    case SyntheticKind::islands: {
      if (spec.groups == 0 || spec.group_size == 0) {
        throw std::invalid_argument("community sizes must be positive");
      }
      const double p_out = spec.kind == SyntheticKind::islands ? 0.0 : spec.p_out;
      for (double p : {spec.p_in, p_out}) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("edge probabilities must lie in [0, 1]");
      }
      return make_communities(spec, p_out);
    }
  }
  throw std::invalid_argument("unknown synthetic kind");
}

}  // namespace rne
