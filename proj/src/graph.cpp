#include "dggan/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "dggan/error.hpp"

namespace dggan {
namespace {

std::uint64_t pair_key(NodeId u, NodeId v) { return (static_cast<std::uint64_t>(u) << 32) | v; }

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_blank(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> tokenize(std::string_view line, std::optional<char> delimiter) {
  std::vector<std::string_view> out;
  if (delimiter && !is_blank(*delimiter)) {
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = line.find(*delimiter, start);
      out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return out;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_blank(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_blank(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool skip_line(std::string_view line) {
  const std::string_view t = trim(line);
  return t.empty() || t.front() == '#' || t.front() == '%';
}

[[noreturn]] void parse_fail(std::string_view source, std::size_t line_no, const std::string& what) {
  std::ostringstream msg;
  msg << source << ":" << line_no << ": " << what;
  throw ParseError(msg.str());
}

std::size_t floor_count(double fraction, std::size_t n) {
  // Guard against 0.29 * 100 == 28.999999999999996.
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

}  // namespace

// ---------------------------------------------------------------------------
// DirectedGraph

DirectedGraph DirectedGraph::from_edges(std::size_t node_count, std::vector<Edge> edges) {
  if (node_count == 0) throw ArgumentError("graph must have at least one node");
  if (node_count > std::numeric_limits<NodeId>::max()) throw ArgumentError("too many nodes");

  DirectedGraph g;
  g.out_offsets_.assign(node_count + 1, 0);
  g.in_offsets_.assign(node_count + 1, 0);
  for (const Edge& e : edges) {
    if (e.src >= node_count || e.dst >= node_count) {
      throw ArgumentError("edge (" + std::to_string(e.src) + ", " + std::to_string(e.dst) +
                          ") references a node outside [0, " + std::to_string(node_count) + ")");
    }
    if (e.src == e.dst) throw ArgumentError("self-loop on node " + std::to_string(e.src));
    ++g.out_offsets_[e.src + 1];
    ++g.in_offsets_[e.dst + 1];
  }
  for (std::size_t i = 0; i < node_count; ++i) {
    g.out_offsets_[i + 1] += g.out_offsets_[i];
    g.in_offsets_[i + 1] += g.in_offsets_[i];
  }
  g.out_targets_.resize(edges.size());
  g.in_sources_.resize(edges.size());
  std::vector<std::size_t> out_fill(g.out_offsets_.begin(), g.out_offsets_.end() - 1);
  std::vector<std::size_t> in_fill(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
  for (const Edge& e : edges) {
    g.out_targets_[out_fill[e.src]++] = e.dst;
    g.in_sources_[in_fill[e.dst]++] = e.src;
  }
  for (std::size_t u = 0; u < node_count; ++u) {
    auto ob = g.out_targets_.begin() + static_cast<std::ptrdiff_t>(g.out_offsets_[u]);
    auto oe = g.out_targets_.begin() + static_cast<std::ptrdiff_t>(g.out_offsets_[u + 1]);
    std::sort(ob, oe);
    if (std::adjacent_find(ob, oe) != oe) {
      throw ArgumentError("duplicate edge out of node " + std::to_string(u));
    }
    std::sort(g.in_sources_.begin() + static_cast<std::ptrdiff_t>(g.in_offsets_[u]),
              g.in_sources_.begin() + static_cast<std::ptrdiff_t>(g.in_offsets_[u + 1]));
  }
  g.edges_ = std::move(edges);
  return g;
}

bool DirectedGraph::has_edge(NodeId u, NodeId v) const {
  if (u >= node_count()) return false;
  const auto nbrs = out_neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

// ---------------------------------------------------------------------------
// NodeIdMap

NodeId NodeIdMap::get_or_insert(std::string_view label) {
  auto [it, inserted] = ids_.try_emplace(std::string(label), static_cast<NodeId>(labels_.size()));
  if (inserted) labels_.emplace_back(label);
  return it->second;
}

std::optional<NodeId> NodeIdMap::find(std::string_view label) const {
  auto it = ids_.find(std::string(label));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Edge-list I/O

LoadedGraph parse_edge_list(std::istream& in, std::optional<char> delimiter,
                            std::string_view source_name) {
  LoadedGraph out;
  std::vector<Edge> edges;
  std::unordered_set<std::uint64_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto tokens = tokenize(line, delimiter);
    if (tokens.size() < 2 || tokens[0].empty() || tokens[1].empty()) {
      parse_fail(source_name, line_no, "expected two node labels, got '" + line + "'");
    }
    const NodeId u = out.ids.get_or_insert(tokens[0]);
    const NodeId v = out.ids.get_or_insert(tokens[1]);
    if (u == v) {
      ++out.self_loops_dropped;
      continue;
    }
    if (!seen.insert(pair_key(u, v)).second) {
      ++out.duplicates_dropped;
      continue;
    }
    edges.push_back({u, v});
  }
  if (in.bad()) throw ParseError(std::string(source_name) + ": read error");
  if (edges.empty()) throw ParseError(std::string(source_name) + ": graph has no edges");
  out.graph = DirectedGraph::from_edges(out.ids.size(), std::move(edges));
  return out;
}

LoadedGraph load_edge_list(const std::filesystem::path& path, std::optional<char> delimiter) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open edge list " + path.string());
  return parse_edge_list(in, delimiter, path.string());
}

// ---------------------------------------------------------------------------
// Splitting and test sets

LinkSplit split_link_prediction(const DirectedGraph& g, double removal_fraction, Rng& rng) {
  if (!(removal_fraction >= 0.0 && removal_fraction < 1.0)) {
    throw ArgumentError("removal fraction must lie in [0, 1), got " +
                        std::to_string(removal_fraction));
  }
  const auto edges = g.edges();
  LinkSplit split;
  split.requested = floor_count(removal_fraction, edges.size());
  if (split.requested == 0) {
    split.train = g;
    return split;
  }

  std::vector<std::size_t> order(edges.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(std::span<std::size_t>(order));

  std::vector<std::size_t> degree(g.node_count(), 0);
  for (NodeId u = 0; u < g.node_count(); ++u) degree[u] = g.in_degree(u) + g.out_degree(u);

  std::vector<char> removed(edges.size(), 0);
  std::size_t count = 0;
  for (std::size_t idx : order) {
    if (count == split.requested) break;
    const Edge& e = edges[idx];
    if (degree[e.src] > 1 && degree[e.dst] > 1) {
      --degree[e.src];
      --degree[e.dst];
      removed[idx] = 1;
      ++count;
    }
  }

  std::vector<Edge> kept;
  kept.reserve(edges.size() - count);
  split.held_out.reserve(count);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    (removed[i] ? split.held_out : kept).push_back(edges[i]);
  }
  split.train = DirectedGraph::from_edges(g.node_count(), std::move(kept));
  return split;
}

LinkSplit split_link_prediction(const DirectedGraph& g, double removal_fraction,
                                std::uint64_t seed) {
  Rng rng = Rng::stream(seed, "split");
  return split_link_prediction(g, removal_fraction, rng);
}

std::string_view to_string(PairKind kind) {
  switch (kind) {
    case PairKind::kHeldOutEdge:
      return "held_out_edge";
    case PairKind::kRandomNonEdge:
      return "random_nonedge";
    case PairKind::kReversedPositive:
      return "reversed_positive";
  }
  return "unknown";
}

std::optional<PairKind> parse_pair_kind(std::string_view text) {
  for (PairKind k : {PairKind::kHeldOutEdge, PairKind::kRandomNonEdge, PairKind::kReversedPositive}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::size_t LabeledPairSet::count_positive() const {
  return static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(), [](const LabeledPair& p) { return p.positive; }));
}

std::size_t LabeledPairSet::count_kind(PairKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      pairs.begin(), pairs.end(), [kind](const LabeledPair& p) { return p.kind == kind; }));
}

LabeledPairSet build_test_set(std::span<const Edge> held_out, const DirectedGraph& full,
                              double reversed_fraction, Rng& rng) {
  if (!(reversed_fraction >= 0.0 && reversed_fraction <= 1.0)) {
    throw ArgumentError("reversed fraction must lie in [0, 1]");
  }
  LabeledPairSet set;
  set.pairs.reserve(2 * held_out.size());
  for (const Edge& e : held_out) set.pairs.push_back({e.src, e.dst, true, PairKind::kHeldOutEdge});

  std::unordered_set<std::uint64_t> chosen;
  const std::size_t quota = floor_count(reversed_fraction, held_out.size());
  if (quota > 0) {
    std::vector<std::size_t> order(held_out.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t idx : order) {
      if (chosen.size() == quota) break;
      const Edge& e = held_out[idx];
      if (full.has_edge(e.dst, e.src)) continue;  // bidirectional
      if (chosen.insert(pair_key(e.dst, e.src)).second) {
        set.pairs.push_back({e.dst, e.src, false, PairKind::kReversedPositive});
      }
    }
    if (chosen.size() < quota) {
      set.warnings.push_back("only " + std::to_string(chosen.size()) + " of " +
                             std::to_string(quota) +
                             " reversals available (bidirectional positives); filled with random "
                             "non-edges");
    }
  }

  const std::size_t needed = held_out.size() - chosen.size();
  const std::size_t n = full.node_count();
  const std::size_t all_pairs = n * (n - 1);
  const std::size_t available = all_pairs - full.edge_count() - chosen.size();

  if (needed > 0 && needed * 2 > available) {
    // Dense graph: enumerate what is left and draw without replacement.
    std::vector<Edge> candidates;
    candidates.reserve(available);
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = 0; v < n; ++v) {
        if (u != v && !full.has_edge(u, v) && !chosen.contains(pair_key(u, v))) {
          candidates.push_back({u, v});
        }
      }
    }
    rng.shuffle(std::span<Edge>(candidates));
    const std::size_t take = std::min(needed, candidates.size());
    for (std::size_t i = 0; i < take; ++i) {
      set.pairs.push_back({candidates[i].src, candidates[i].dst, false, PairKind::kRandomNonEdge});
    }
    if (take < needed) {
      set.warnings.push_back("graph too dense: only " + std::to_string(take) + " of " +
                             std::to_string(needed) + " random negatives exist");
    }
    return set;
  }

  std::size_t added = 0;
  while (added < needed) {
    const auto u = static_cast<NodeId>(rng.index(n));
    const auto v = static_cast<NodeId>(rng.index(n));
    if (u == v || full.has_edge(u, v)) continue;
    if (!chosen.insert(pair_key(u, v)).second) continue;
    set.pairs.push_back({u, v, false, PairKind::kRandomNonEdge});
    ++added;
  }
  return set;
}

std::vector<Edge> sample_edge_batch(const DirectedGraph& g, std::size_t batch_size, Rng& rng) {
  if (batch_size == 0) throw ArgumentError("batch size must be positive");
  const auto edges = g.edges();
  std::vector<Edge> batch(batch_size);
  for (auto& e : batch) e = edges[rng.index(edges.size())];
  return batch;
}

std::vector<NodeId> sample_node_batch(std::size_t node_count, std::size_t batch_size, Rng& rng) {
  if (batch_size == 0) throw ArgumentError("batch size must be positive");
  std::vector<NodeId> batch(batch_size);
  for (auto& u : batch) u = static_cast<NodeId>(rng.index(node_count));
  return batch;
}

// ---------------------------------------------------------------------------
// Labels

std::size_t NodeLabels::labeled_count() const {
  return static_cast<std::size_t>(
      std::count_if(class_of.begin(), class_of.end(), [](const auto& c) { return c.has_value(); }));
}

NodeLabels parse_labels(std::istream& in, const NodeIdMap& ids, std::optional<char> delimiter,
                        std::string_view source_name) {
  NodeLabels out;
  out.class_of.assign(ids.size(), std::nullopt);
  std::unordered_map<std::string, int> class_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto tokens = tokenize(line, delimiter);
    if (tokens.size() < 2 || tokens[0].empty() || tokens[1].empty()) {
      parse_fail(source_name, line_no, "expected 'node class', got '" + line + "'");
    }
    const auto node = ids.find(tokens[0]);
    if (!node) parse_fail(source_name, line_no, "unknown node '" + std::string(tokens[0]) + "'");
    auto [it, inserted] =
        class_ids.try_emplace(std::string(tokens[1]), static_cast<int>(out.class_names.size()));
    if (inserted) out.class_names.emplace_back(tokens[1]);
    auto& slot = out.class_of[*node];
    if (slot && *slot != it->second) {
      parse_fail(source_name, line_no,
                 "node '" + std::string(tokens[0]) + "' has conflicting classes '" +
                     out.class_names[static_cast<std::size_t>(*slot)] + "' and '" +
                     std::string(tokens[1]) + "'");
    }
    slot = it->second;
  }
  return out;
}

NodeLabels load_labels(const std::filesystem::path& path, const NodeIdMap& ids,
                       std::optional<char> delimiter) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open label file " + path.string());
  return parse_labels(in, ids, delimiter, path.string());
}

// ---------------------------------------------------------------------------
// Split manifest

void write_split_manifest(std::ostream& out, const SplitManifest& m, const NodeIdMap& ids) {
  out << "# dggan split manifest v1\n";
  for (const auto& h : m.header) out << "# " << h << "\n";
  out << "held_out\t" << m.held_out.size() << "\n";
  for (const Edge& e : m.held_out) out << ids.label(e.src) << "\t" << ids.label(e.dst) << "\n";
  for (const auto& [fraction, set] : m.tests) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", fraction);
    out << "test\t" << buf << "\t" << set.pairs.size() << "\n";
    for (const LabeledPair& p : set.pairs) {
      out << ids.label(p.u) << "\t" << ids.label(p.v) << "\t" << (p.positive ? 1 : 0) << "\t"
          << to_string(p.kind) << "\n";
    }
  }
}

SplitManifest read_split_manifest(std::istream& in, const NodeIdMap& ids,
                                  std::string_view source_name) {
  SplitManifest m;
  std::string line;
  std::size_t line_no = 0;
  auto node = [&](std::string_view label) {
    auto id = ids.find(label);
    if (!id) parse_fail(source_name, line_no, "unknown node '" + std::string(label) + "'");
    return *id;
  };
  auto next_record = [&]() -> std::vector<std::string_view> {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.rfind("# ", 0) == 0) {
        if (line.rfind("# dggan split manifest", 0) != 0) m.header.push_back(line.substr(2));
        continue;
      }
      if (skip_line(line)) continue;
      return tokenize(line, '\t');
    }
    return {};
  };
  auto count_of = [&](std::string_view s) {
    try {
      return static_cast<std::size_t>(std::stoull(std::string(s)));
    } catch (const std::exception&) {
      parse_fail(source_name, line_no, "bad count '" + std::string(s) + "'");
    }
  };

  auto rec = next_record();
  if (rec.size() != 2 || rec[0] != "held_out") parse_fail(source_name, line_no, "expected held_out");
  const std::size_t n_held = count_of(rec[1]);
  for (std::size_t i = 0; i < n_held; ++i) {
    rec = next_record();
    if (rec.size() != 2) parse_fail(source_name, line_no, "expected held-out edge");
    m.held_out.push_back({node(rec[0]), node(rec[1])});
  }
  while (!(rec = next_record()).empty()) {
    if (rec.size() != 3 || rec[0] != "test") parse_fail(source_name, line_no, "expected test");
    double fraction = 0.0;
    try {
      fraction = std::stod(std::string(rec[1]));
    } catch (const std::exception&) {
      parse_fail(source_name, line_no, "bad fraction");
    }
    const std::size_t n_pairs = count_of(rec[2]);
    LabeledPairSet set;
    for (std::size_t i = 0; i < n_pairs; ++i) {
      rec = next_record();
      if (rec.size() != 4) parse_fail(source_name, line_no, "expected labeled pair");
      const auto kind = parse_pair_kind(rec[3]);
      if (!kind || (rec[2] != "0" && rec[2] != "1")) {
        parse_fail(source_name, line_no, "bad label or kind");
      }
      set.pairs.push_back({node(rec[0]), node(rec[1]), rec[2] == "1", *kind});
    }
    m.tests.emplace_back(fraction, std::move(set));
  }
  return m;
}

GraphStats graph_stats(const DirectedGraph& g) {
  GraphStats s;
  s.nodes = g.node_count();
  s.edges = g.edge_count();
  s.average_degree = 2.0 * static_cast<double>(s.edges) / static_cast<double>(s.nodes);
  for (NodeId u = 0; u < s.nodes; ++u) {
    s.zero_in_degree += g.in_degree(u) == 0;
    s.zero_out_degree += g.out_degree(u) == 0;
    s.max_out_degree = std::max(s.max_out_degree, g.out_degree(u));
    s.max_in_degree = std::max(s.max_in_degree, g.in_degree(u));
  }
  for (const Edge& e : g.edges()) s.bidirectional_edges += g.has_edge(e.dst, e.src);
  return s;
}

}  // namespace dggan
