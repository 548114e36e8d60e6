#pragma once

#include <set>
#include <vector>

#include "dggan/graph.hpp"
#include "dggan/trainer.hpp"

namespace dggan::testing {

/// Nodes [0, half) form group A and [half, 2*half) group B; every A node
/// gets `out_degree` distinct out-edges into B and nothing else exists.
inline DirectedGraph bipartite_graph(std::size_t half, std::size_t out_degree, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> edges;
  for (NodeId a = 0; a < half; ++a) {
    std::set<NodeId> targets;
    while (targets.size() < out_degree) {
      targets.insert(static_cast<NodeId>(half + rng.index(half)));
    }
    for (NodeId b : targets) edges.push_back({a, b});
  }
  return DirectedGraph::from_edges(2 * half, std::move(edges));
}

/// Random DAG: edges only from lower to higher ids, each node after the
/// first gets at least one in-edge.
inline DirectedGraph random_dag(std::size_t n, std::size_t extra_edges, std::uint64_t seed) {
  Rng rng(seed);
  std::set<Edge> edges;
  for (NodeId v = 1; v < n; ++v) edges.insert({static_cast<NodeId>(rng.index(v)), v});
  while (edges.size() < n - 1 + extra_edges) {
    auto u = static_cast<NodeId>(rng.index(n));
    auto v = static_cast<NodeId>(rng.index(n));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    edges.insert({u, v});
  }
  return DirectedGraph::from_edges(n, {edges.begin(), edges.end()});
}

/// Desk-scale settings for the 200-node direction task.
inline TrainConfig direction_task_config() {
  TrainConfig c;
  c.model.dim = 16;
  c.n_epoch = 100;
  c.batch_size = 256;
  return c;
}

}  // namespace dggan::testing
