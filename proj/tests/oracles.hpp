// Independent reference computations shared by the unit and acceptance tests.
// Nothing here calls the solver it is meant to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "orcurv/graph.hpp"

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// All-pairs distances by Floyd-Warshall on an undirected edge list.
inline std::vector<std::vector<double>> floyd_warshall(std::size_t n, const std::vector<orc::Edge>& edges) {
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  for (const auto& e : edges) {
    d[e.u][e.v] = std::min(d[e.u][e.v], e.weight);
    d[e.v][e.u] = std::min(d[e.v][e.u], e.weight);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

/// Hop counts by breadth-first search (unreachable = -1).
inline std::vector<int> bfs_hops(std::size_t n, const std::vector<orc::Edge>& edges, int source) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<int> hops(n, -1);
  std::vector<int> queue{source};
  hops[source] = 0;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    for (int w : adj[queue[h]]) {
      if (hops[w] < 0) {
        hops[w] = hops[queue[h]] + 1;
        queue.push_back(w);
      }
    }
  }
  return hops;
}

/// min over all k! permutation plans of sum_i cost[i][perm i], divided by k.
inline double min_permutation_cost(const std::vector<std::vector<double>>& cost) {
  const std::size_t k = cost.size();
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double best = kInf;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += cost[i][perm[i]];
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(k);
}

/// Erdos-Renyi edge list; weights uniform in [lo, hi) or 1 when lo == hi == 1.
inline std::vector<orc::Edge> random_edges(std::size_t n, double p, std::mt19937_64& rng, double lo = 1.0,
                                           double hi = 1.0) {
  std::bernoulli_distribution coin(p);
  std::uniform_real_distribution<double> w(lo, hi);
  std::vector<orc::Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng)) edges.push_back({static_cast<orc::NodeId>(i), static_cast<orc::NodeId>(j), lo == hi ? lo : w(rng)});
  return edges;
}

inline orc::GeoGraph make_graph(std::size_t n, const std::vector<orc::Edge>& edges) {
  return orc::GeoGraph::from_edges(n, edges, orc::GraphMeta{});
}

/// Path graph 0 - 1 - ... - (n-1) with unit weights.
inline orc::GeoGraph path_graph(std::size_t n) {
  std::vector<orc::Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.push_back({orc::NodeId(i), orc::NodeId(i + 1), 1.0});
  return make_graph(n, e);
}

inline orc::GeoGraph complete_graph(std::size_t n) {
  std::vector<orc::Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.push_back({orc::NodeId(i), orc::NodeId(j), 1.0});
  return make_graph(n, e);
}

}  // namespace oracle
