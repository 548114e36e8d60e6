#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dggan/rng.hpp"

namespace dggan {

using NodeId = std::uint32_t;

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  auto operator<=>(const Edge&) const = default;
};

/// Immutable simple directed graph with dense node ids and sorted
/// out/in adjacency lists.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  /// Throws ArgumentError on self-loops, duplicate edges, out-of-range ids
  /// or node_count == 0.
  static DirectedGraph from_edges(std::size_t node_count, std::vector<Edge> edges);

  std::size_t node_count() const { return out_offsets_.empty() ? 0 : out_offsets_.size() - 1; }
  std::size_t edge_count() const { return edges_.size(); }

  /// Edges in the order given at construction.
  std::span<const Edge> edges() const { return edges_; }

  std::span<const NodeId> out_neighbors(NodeId u) const {
    return {out_targets_.data() + out_offsets_[u], out_offsets_[u + 1] - out_offsets_[u]};
  }
  std::span<const NodeId> in_neighbors(NodeId v) const {
    return {in_sources_.data() + in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]};
  }
  std::size_t out_degree(NodeId u) const { return out_offsets_[u + 1] - out_offsets_[u]; }
  std::size_t in_degree(NodeId v) const { return in_offsets_[v + 1] - in_offsets_[v]; }

  bool has_edge(NodeId u, NodeId v) const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_;
  std::vector<NodeId> out_targets_;
  std::vector<std::size_t> in_offsets_;
  std::vector<NodeId> in_sources_;
};

/// External label <-> dense id bijection. Ids are assigned in order of first
/// appearance, so reloading the same file reproduces the same ids.
class NodeIdMap {
 public:
  NodeId get_or_insert(std::string_view label);
  std::optional<NodeId> find(std::string_view label) const;
  const std::string& label(NodeId id) const { return labels_[id]; }
  std::size_t size() const { return labels_.size(); }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> ids_;
};

struct LoadedGraph {
  DirectedGraph graph;
  NodeIdMap ids;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_dropped = 0;
};

/// Edge-list parser. One edge per line, `src<delim>dst`; tokens after the
/// second are ignored. Lines starting with '#' or '%' and blank lines are
/// skipped. With no delimiter, any run of spaces/tabs separates tokens.
LoadedGraph parse_edge_list(std::istream& in, std::optional<char> delimiter = std::nullopt,
                            std::string_view source_name = "<stream>");
LoadedGraph load_edge_list(const std::filesystem::path& path,
                           std::optional<char> delimiter = std::nullopt);

struct LinkSplit {
  DirectedGraph train;
  std::vector<Edge> held_out;
  std::size_t requested = 0;
  /// True when fewer than `requested` edges could be removed without
  /// isolating a node.
  bool shortfall() const { return held_out.size() < requested; }
};

/// Removes floor(removal_fraction * |E|) edges at random while keeping every
/// node's total degree >= 1 in the training graph. Edges are visited in a
/// seeded shuffled order and removed greedily.
LinkSplit split_link_prediction(const DirectedGraph& g, double removal_fraction, Rng& rng);
LinkSplit split_link_prediction(const DirectedGraph& g, double removal_fraction,
                                std::uint64_t seed);

enum class PairKind : std::uint8_t { kHeldOutEdge, kRandomNonEdge, kReversedPositive };
std::string_view to_string(PairKind kind);
std::optional<PairKind> parse_pair_kind(std::string_view text);

struct LabeledPair {
  NodeId u = 0;
  NodeId v = 0;
  bool positive = false;
  PairKind kind = PairKind::kHeldOutEdge;
  bool operator==(const LabeledPair&) const = default;
};

struct LabeledPairSet {
  std::vector<LabeledPair> pairs;
  std::vector<std::string> warnings;

  std::size_t count_positive() const;
  std::size_t count_kind(PairKind kind) const;
};

/// Balanced test set: held-out edges as positives; negatives are first up to
/// floor(reversed_fraction * |held_out|) reversals of non-bidirectional
/// positives, then uniformly drawn node pairs that are not edges of `full`.
LabeledPairSet build_test_set(std::span<const Edge> held_out, const DirectedGraph& full,
                              double reversed_fraction, Rng& rng);

/// batch_size edges drawn uniformly with replacement.
std::vector<Edge> sample_edge_batch(const DirectedGraph& g, std::size_t batch_size, Rng& rng);
/// batch_size node ids drawn uniformly with replacement.
std::vector<NodeId> sample_node_batch(std::size_t node_count, std::size_t batch_size, Rng& rng);

/// Partial node -> class assignment. Class ids are dense, in order of first
/// appearance in the file.
struct NodeLabels {
  std::vector<std::optional<int>> class_of;  // indexed by NodeId
  std::vector<std::string> class_names;

  std::size_t labeled_count() const;
  std::size_t class_count() const { return class_names.size(); }
};

NodeLabels parse_labels(std::istream& in, const NodeIdMap& ids, std::optional<char> delimiter,
                        std::string_view source_name = "<stream>");
NodeLabels load_labels(const std::filesystem::path& path, const NodeIdMap& ids,
                       std::optional<char> delimiter = std::nullopt);

/// Held-out edges plus the labeled test sets built from them, keyed by the
/// reversed fraction. Written with external node labels so it can be checked
/// into an experiment directory.
struct SplitManifest {
  std::vector<std::string> header;  // free-form "key=value" lines
  std::vector<Edge> held_out;
  std::vector<std::pair<double, LabeledPairSet>> tests;
};

void write_split_manifest(std::ostream& out, const SplitManifest& manifest, const NodeIdMap& ids);
SplitManifest read_split_manifest(std::istream& in, const NodeIdMap& ids,
                                  std::string_view source_name = "<stream>");

struct GraphStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double average_degree = 0.0;  // 2|E| / |V|
  std::size_t zero_in_degree = 0;
  std::size_t zero_out_degree = 0;
  std::size_t bidirectional_edges = 0;  // edges (u,v) whose reverse is also present
  std::size_t max_out_degree = 0;
  std::size_t max_in_degree = 0;
};

GraphStats graph_stats(const DirectedGraph& g);

}  // namespace dggan
