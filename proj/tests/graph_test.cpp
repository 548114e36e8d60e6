#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "dggan/error.hpp"
#include "dggan/graph.hpp"

namespace dggan {
namespace {

LoadedGraph parse(const std::string& text) {
  std::istringstream in(text);
  return parse_edge_list(in);
}

DirectedGraph cycle3() { return DirectedGraph::from_edges(3, {{0, 1}, {1, 2}, {2, 0}}); }

DirectedGraph star5() {
  return DirectedGraph::from_edges(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
}

DirectedGraph random_graph(std::size_t n, std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  std::set<Edge> edges;
  while (edges.size() < m) {
    const auto u = static_cast<NodeId>(rng.index(n));
    const auto v = static_cast<NodeId>(rng.index(n));
    if (u != v) edges.insert({u, v});
  }
  return DirectedGraph::from_edges(n, {edges.begin(), edges.end()});
}

std::vector<std::size_t> total_degree(std::size_t n, std::span<const Edge> edges) {
  std::vector<std::size_t> deg(n, 0);
  for (const auto& e : edges) {
    ++deg[e.src];
    ++deg[e.dst];
  }
  return deg;
}

// Largest number of edges removable without leaving any node with total
// degree zero, found by enumerating every subset.
std::size_t max_removable(const DirectedGraph& g) {
  const auto edges = g.edges();
  const std::size_t m = edges.size();
  const auto base = total_degree(g.node_count(), edges);
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    auto deg = base;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (1u << i)) {
        --deg[edges[i].src];
        --deg[edges[i].dst];
      }
    }
    if (std::all_of(deg.begin(), deg.end(), [](std::size_t d) { return d >= 1; })) {
      best = std::max<std::size_t>(best, std::popcount(mask));
    }
  }
  return best;
}

TEST(DirectedGraph, AdjacencyMirrorsEdges) {
  const auto g = random_graph(15, 40, 3);
  std::size_t out_sum = 0;
  std::size_t in_sum = 0;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    out_sum += g.out_degree(u);
    in_sum += g.in_degree(u);
    for (NodeId v : g.out_neighbors(u)) {
      const auto in = g.in_neighbors(v);
      EXPECT_NE(std::find(in.begin(), in.end(), u), in.end());
      EXPECT_TRUE(g.has_edge(u, v));
    }
  }
  EXPECT_EQ(out_sum, g.edge_count());
  EXPECT_EQ(in_sum, g.edge_count());
}

TEST(DirectedGraph, RejectsInvalidEdges) {
  EXPECT_THROW(DirectedGraph::from_edges(2, {{0, 0}}), ArgumentError);
  EXPECT_THROW(DirectedGraph::from_edges(2, {{0, 1}, {0, 1}}), ArgumentError);
  EXPECT_THROW(DirectedGraph::from_edges(2, {{0, 2}}), ArgumentError);
  EXPECT_THROW(DirectedGraph::from_edges(0, {}), ArgumentError);
}

TEST(DirectedGraph, HasEdgeIsDirected) {
  const auto g = DirectedGraph::from_edges(2, {{0, 1}});
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_FALSE(g.has_edge(1, 0));
}

TEST(EdgeList, ThreeCycle) {
  const auto loaded = parse("a b\nb c\nc a\n");
  EXPECT_EQ(loaded.graph.node_count(), 3u);
  EXPECT_EQ(loaded.graph.edge_count(), 3u);
  for (NodeId u = 0; u < 3; ++u) {
    EXPECT_EQ(loaded.graph.out_degree(u), 1u);
    EXPECT_EQ(loaded.graph.in_degree(u), 1u);
  }
  EXPECT_EQ(loaded.ids.label(0), "a");
  EXPECT_EQ(loaded.ids.find("c"), NodeId{2});
}

TEST(EdgeList, DuplicatesCollapse) {
  const auto loaded = parse("a b\na b");
  EXPECT_EQ(loaded.graph.edge_count(), 1u);
  EXPECT_EQ(loaded.duplicates_dropped, 1u);
}

TEST(EdgeList, SelfLoopDropped) {
  const auto loaded = parse("a a\na b");
  EXPECT_EQ(loaded.graph.edge_count(), 1u);
  EXPECT_EQ(loaded.self_loops_dropped, 1u);
}

TEST(EdgeList, CommentsBlankLinesAndExtraColumns) {
  const auto loaded = parse("# header\n% konect header\n\n1 2 0.5 17\n2\t3\n");
  EXPECT_EQ(loaded.graph.edge_count(), 2u);
  EXPECT_EQ(loaded.graph.node_count(), 3u);
}

TEST(EdgeList, ExplicitDelimiterKeepsSpacesInLabels) {
  std::istringstream in("node one,node two\n");
  const auto loaded = parse_edge_list(in, ',');
  ASSERT_EQ(loaded.graph.edge_count(), 1u);
  EXPECT_EQ(loaded.ids.label(0), "node one");
}

TEST(EdgeList, MalformedLineNamesLine) {
  try {
    parse("a b\nlonely\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
}

TEST(EdgeList, EmptyGraphIsAnError) {
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("# only a comment\n"), ParseError);
  EXPECT_THROW(parse("a a\n"), ParseError);
}

TEST(EdgeList, MissingFile) {
  EXPECT_THROW(load_edge_list("/nonexistent/graph.tsv"), ParseError);
}

TEST(Split, ZeroRemovalIsIdentity) {
  const auto g = random_graph(10, 20, 1);
  const auto split = split_link_prediction(g, 0.0, 5);
  EXPECT_TRUE(split.held_out.empty());
  EXPECT_EQ(split.train.edge_count(), g.edge_count());
  EXPECT_FALSE(split.shortfall());
}

TEST(Split, RejectsFractionOutsideRange) {
  const auto g = cycle3();
  EXPECT_THROW(split_link_prediction(g, 1.0, 1), ArgumentError);
  EXPECT_THROW(split_link_prediction(g, -0.1, 1), ArgumentError);
}

TEST(Split, ThreeCycleRemovesExactlyOne) {
  const auto g = cycle3();
  EXPECT_EQ(max_removable(g), 1u);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto split = split_link_prediction(g, 0.34, seed);
    EXPECT_EQ(split.requested, 1u);
    EXPECT_EQ(split.held_out.size(), 1u);
    for (auto d : total_degree(3, split.train.edges())) EXPECT_GE(d, 1u);
  }
}

TEST(Split, StarShortfallIsReported) {
  const auto g = star5();
  EXPECT_EQ(max_removable(g), 0u);
  const auto split = split_link_prediction(g, 0.9, 1);
  EXPECT_EQ(split.requested, 4u);
  EXPECT_TRUE(split.held_out.empty());
  EXPECT_TRUE(split.shortfall());
}

TEST(Split, PartitionAndNonIsolationAgainstEnumeration) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto g = random_graph(7, 12, 100 + seed);
    const auto input_degree = total_degree(g.node_count(), g.edges());
    // Edge lists never produce isolated nodes; skip draws that do.
    if (std::find(input_degree.begin(), input_degree.end(), 0u) != input_degree.end()) continue;
    const std::size_t best = max_removable(g);
    for (double fraction : {0.2, 0.5, 0.9}) {
      const auto split = split_link_prediction(g, fraction, seed);
      std::vector<Edge> all(split.train.edges().begin(), split.train.edges().end());
      all.insert(all.end(), split.held_out.begin(), split.held_out.end());
      std::sort(all.begin(), all.end());
      std::vector<Edge> original(g.edges().begin(), g.edges().end());
      std::sort(original.begin(), original.end());
      EXPECT_EQ(all, original);
      EXPECT_EQ(std::adjacent_find(all.begin(), all.end()), all.end());

      for (auto d : total_degree(g.node_count(), split.train.edges())) EXPECT_GE(d, 1u);
      EXPECT_LE(split.held_out.size(), std::min(split.requested, best));
      if (split.shortfall()) {
        // Greedy stops only when no remaining edge can go.
        const auto deg = total_degree(g.node_count(), split.train.edges());
        for (const auto& e : split.train.edges()) {
          EXPECT_TRUE(deg[e.src] == 1 || deg[e.dst] == 1);
        }
      } else {
        EXPECT_EQ(split.held_out.size(), split.requested);
      }
    }
  }
}

TEST(Split, SameSeedSameSplit) {
  const auto g = random_graph(30, 90, 2);
  const auto a = split_link_prediction(g, 0.5, 11);
  const auto b = split_link_prediction(g, 0.5, 11);
  const auto c = split_link_prediction(g, 0.5, 12);
  EXPECT_EQ(a.held_out, b.held_out);
  EXPECT_NE(a.held_out, c.held_out);
}

TEST(TestSet, ZeroReversedGivesRandomNegatives) {
  const auto g = random_graph(30, 80, 4);
  const auto split = split_link_prediction(g, 0.5, 1);
  Rng rng(9);
  const auto set = build_test_set(split.held_out, g, 0.0, rng);
  EXPECT_EQ(set.count_positive(), split.held_out.size());
  EXPECT_EQ(set.pairs.size(), 2 * split.held_out.size());
  EXPECT_EQ(set.count_kind(PairKind::kRandomNonEdge), split.held_out.size());
  for (const auto& p : set.pairs) {
    if (p.positive) {
      EXPECT_TRUE(g.has_edge(p.u, p.v));
      EXPECT_FALSE(split.train.has_edge(p.u, p.v));
    } else {
      EXPECT_FALSE(g.has_edge(p.u, p.v));
      EXPECT_NE(p.u, p.v);
    }
  }
}

TEST(TestSet, SingleReversal) {
  const auto g = DirectedGraph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  const std::vector<Edge> held{{1, 2}};
  Rng rng(1);
  const auto set = build_test_set(held, g, 1.0, rng);
  ASSERT_EQ(set.pairs.size(), 2u);
  const auto neg = std::find_if(set.pairs.begin(), set.pairs.end(),
                                [](const LabeledPair& p) { return !p.positive; });
  EXPECT_EQ(neg->u, 2u);
  EXPECT_EQ(neg->v, 1u);
  EXPECT_EQ(neg->kind, PairKind::kReversedPositive);
}

TEST(TestSet, BidirectionalPositiveIsNotReversed) {
  const auto g = DirectedGraph::from_edges(4, {{0, 1}, {1, 0}, {2, 3}});
  const std::vector<Edge> held{{0, 1}};
  Rng rng(1);
  const auto set = build_test_set(held, g, 1.0, rng);
  EXPECT_EQ(set.count_kind(PairKind::kReversedPositive), 0u);
  EXPECT_EQ(set.count_kind(PairKind::kRandomNonEdge), 1u);
  EXPECT_FALSE(set.warnings.empty());
}

TEST(TestSet, FullReversalWithoutBidirectionalEdges) {
  // Edges only go from the lower half to the upper half, so none is mutual.
  Rng build(5);
  std::set<Edge> edges;
  while (edges.size() < 60) {
    edges.insert({static_cast<NodeId>(build.index(10)), static_cast<NodeId>(10 + build.index(10))});
  }
  const auto g = DirectedGraph::from_edges(20, {edges.begin(), edges.end()});
  const auto split = split_link_prediction(g, 0.5, 3);
  Rng rng(2);
  const auto set = build_test_set(split.held_out, g, 1.0, rng);
  EXPECT_EQ(set.count_kind(PairKind::kRandomNonEdge), 0u);
  EXPECT_EQ(set.count_kind(PairKind::kReversedPositive), split.held_out.size());
}

TEST(TestSet, HalfReversalQuota) {
  const auto g = DirectedGraph::from_edges(
      8, {{0, 4}, {1, 5}, {2, 6}, {3, 7}, {0, 5}, {1, 6}, {2, 7}, {3, 4}});
  const std::vector<Edge> held{{0, 4}, {1, 5}, {2, 6}, {3, 7}};
  Rng rng(4);
  const auto set = build_test_set(held, g, 0.5, rng);
  EXPECT_EQ(set.count_kind(PairKind::kReversedPositive), 2u);
  EXPECT_EQ(set.count_kind(PairKind::kRandomNonEdge), 2u);
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const auto& p : set.pairs) EXPECT_TRUE(seen.insert({p.u, p.v}).second);
}

TEST(Sampling, SingleEdgeAlwaysDrawn) {
  const auto g = DirectedGraph::from_edges(2, {{0, 1}});
  Rng rng(3);
  for (const auto& e : sample_edge_batch(g, 64, rng)) EXPECT_EQ(e, (Edge{0, 1}));
}

TEST(Sampling, TwoEdgesBalanced) {
  const auto g = DirectedGraph::from_edges(3, {{0, 1}, {1, 2}});
  Rng rng(17);
  const auto batch = sample_edge_batch(g, 10000, rng);
  const auto first = std::count(batch.begin(), batch.end(), Edge{0, 1});
  const double freq = static_cast<double>(first) / 10000.0;
  EXPECT_GE(freq, 0.47);
  EXPECT_LE(freq, 0.53);
}

TEST(Sampling, SeededBatchesRepeat) {
  const auto g = random_graph(20, 50, 8);
  Rng a(42);
  Rng b(42);
  EXPECT_EQ(sample_edge_batch(g, 100, a), sample_edge_batch(g, 100, b));
  EXPECT_EQ(sample_node_batch(20, 100, a), sample_node_batch(20, 100, b));
  EXPECT_THROW(sample_edge_batch(g, 0, a), ArgumentError);
}

class LabelsTest : public ::testing::Test {
 protected:
  LabelsTest() : loaded_(parse("a b\nb c\n")) {}
  NodeLabels labels(const std::string& text) {
    std::istringstream in(text);
    return parse_labels(in, loaded_.ids, std::nullopt);
  }
  LoadedGraph loaded_;
};

TEST_F(LabelsTest, PartialMap) {
  const auto l = labels("a 0\nb 1\n");
  EXPECT_EQ(l.labeled_count(), 2u);
  EXPECT_EQ(l.class_count(), 2u);
  EXPECT_FALSE(l.class_of[2].has_value());
}

TEST_F(LabelsTest, RepeatedConsistentLineIsFine) {
  EXPECT_EQ(labels("a 0\na 0\n").labeled_count(), 1u);
}

TEST_F(LabelsTest, ConflictingDuplicate) { EXPECT_THROW(labels("a 0\na 1\n"), ParseError); }

TEST_F(LabelsTest, UnknownNodeIsNamed) {
  try {
    labels("zebra 1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("zebra"), std::string::npos);
  }
}

TEST_F(LabelsTest, EmptyFileGivesEmptyMap) {
  const auto l = labels("");
  EXPECT_EQ(l.labeled_count(), 0u);
  EXPECT_EQ(l.class_of.size(), 3u);
}

TEST(SplitManifest, RoundTrip) {
  const auto loaded = parse("a b\nb c\nc d\nd a\na c\n");
  const auto split = split_link_prediction(loaded.graph, 0.4, 2);
  SplitManifest m;
  m.header = {"seed=2", "removal=0.4"};
  m.held_out = split.held_out;
  for (double f : {0.0, 1.0}) {
    Rng rng(7);
    m.tests.emplace_back(f, build_test_set(split.held_out, loaded.graph, f, rng));
  }
  std::stringstream io;
  write_split_manifest(io, m, loaded.ids);
  const auto back = read_split_manifest(io, loaded.ids);
  EXPECT_EQ(back.header, m.header);
  EXPECT_EQ(back.held_out, m.held_out);
  ASSERT_EQ(back.tests.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.tests[i].first, m.tests[i].first);
    EXPECT_EQ(back.tests[i].second.pairs, m.tests[i].second.pairs);
  }
}

TEST(Stats, CountsDegreesAndMutualEdges) {
  const auto g = DirectedGraph::from_edges(4, {{0, 1}, {1, 0}, {1, 2}, {0, 2}});
  const auto st = graph_stats(g);
  EXPECT_EQ(st.nodes, 4u);
  EXPECT_EQ(st.edges, 4u);
  EXPECT_DOUBLE_EQ(st.average_degree, 2.0);
  EXPECT_EQ(st.bidirectional_edges, 2u);
  EXPECT_EQ(st.zero_out_degree, 2u);
  EXPECT_EQ(st.zero_in_degree, 1u);
  EXPECT_EQ(st.max_out_degree, 2u);
  EXPECT_EQ(st.max_in_degree, 2u);
}

}  // namespace
}  // namespace dggan
