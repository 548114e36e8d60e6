#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "dggan/eval.hpp"
#include "dggan/graph.hpp"
#include "dggan/rng.hpp"

namespace dggan::testing {

/// Every (positive, negative) pair, ties counting one half.
inline double brute_force_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double p : pos) {
    for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  }
  return wins / static_cast<double>(pos.size() * neg.size());
}

/// Full sort of every candidate, ties by ascending id.
inline std::vector<double> naive_precision(const DiscriminatorParams& disc, const DirectedGraph& g,
                                           const std::vector<NodeId>& sources,
                                           const std::vector<std::size_t>& ks) {
  std::vector<double> out(ks.size(), 0.0);
  for (NodeId u : sources) {
    std::vector<NodeId> cand;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (v != u) cand.push_back(v);
    }
    std::stable_sort(cand.begin(), cand.end(), [&](NodeId a, NodeId b) {
      return score_pair(disc, u, a) > score_pair(disc, u, b);
    });
    for (std::size_t i = 0; i < ks.size(); ++i) {
      std::size_t hits = 0;
      for (std::size_t r = 0; r < ks[i]; ++r) hits += g.has_edge(u, cand[r]) ? 1 : 0;
      out[i] += static_cast<double>(hits) / static_cast<double>(ks[i]);
    }
  }
  for (double& x : out) x /= static_cast<double>(sources.size());
  return out;
}

inline DirectedGraph random_graph(std::size_t n, std::size_t m, Rng& rng) {
  std::set<Edge> edges;
  while (edges.size() < m) {
    const auto u = static_cast<NodeId>(rng.index(n));
    const auto v = static_cast<NodeId>(rng.index(n));
    if (u != v) edges.insert({u, v});
  }
  return DirectedGraph::from_edges(n, {edges.begin(), edges.end()});
}

}  // namespace dggan::testing
