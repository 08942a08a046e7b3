#include "orcurv/curvature.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <string>

#include "orcurv/errors.hpp"
#include "orcurv/transport.hpp"

namespace orc {

namespace {

std::vector<int> hop_distances(const GeoGraph& graph, NodeId source) {
  std::vector<int> hops(graph.node_count(), -1);
  std::deque<NodeId> queue{source};
  hops[source] = 0;
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    for (NodeId u : graph.neighbors(v)) {
      if (hops[u] < 0) {
        hops[u] = hops[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return hops;
}

void require_edge(const GeoGraph& graph, NodeId i, NodeId j) {
  const auto n = static_cast<NodeId>(graph.node_count());
  if (i < 0 || j < 0 || i >= n || j >= n || !graph.has_edge(i, j)) {
    throw MissingEdgeError("no edge " + std::to_string(i) + "-" + std::to_string(j));
  }
}

}  // namespace

namespace {

ProbeError disconnected(const std::string& why) {
  return ProbeError("probe balls are not connected (" + why + ")");
}

/// W with graph distances evaluated on demand. Solve on coordinate lower
/// bounds, replace the costs on the plan's support by exact graph distances and
/// re-solve until the support is exact. Off-support costs stay below the true
/// ones, so the last plan is optimal for the true costs as well.
double lazy_wasserstein(const GeoGraph& graph, const DistanceMatrix& bounds, double cost_ceiling,
                        const MatrixOptions& options) {
  const std::size_t m = bounds.rows();
  const std::size_t k = bounds.cols();
  std::vector<char> exact(m * k, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j) exact[i * k + j] = bounds.row_nodes()[i] == bounds.col_nodes()[j];

  UniformTransportSolver solver({bounds.data().begin(), bounds.data().end()}, m, k, cost_ceiling);
  std::vector<NodePair> pending;
  std::vector<std::size_t> where;
  std::vector<std::pair<double, std::size_t>> extra;
  // Besides the support, each round also evaluates the pairs whose reduced
  // cost is within the largest bound gap seen so far; those are the ones a
  // corrected cost is likely to pull into the plan.
  double gap = 0.0;
  while (true) {
    const UniformTransport t = solver.solve();
    pending.clear();
    where.clear();
    extra.clear();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t a = i * k + j;
        if (exact[a]) continue;
        const double reduced = solver.cost()[a] - t.row_potential[i] - t.col_potential[j];
        if (t.flow[a] > 0.0) {
          where.push_back(a);
        } else if (reduced <= gap) {
          extra.emplace_back(reduced, a);
        }
      }
    }
    // At most as many extras as support pairs, smallest reduced cost first.
    const std::size_t cap = where.size();
    if (extra.size() > cap) {
      std::nth_element(extra.begin(), extra.begin() + static_cast<std::ptrdiff_t>(cap), extra.end());
      extra.resize(cap);
    }
    for (const auto& e : extra) where.push_back(e.second);
    for (std::size_t a : where) pending.emplace_back(bounds.row_nodes()[a / k], bounds.col_nodes()[a % k]);
    if (pending.empty()) return t.value;
    const auto d = pair_distances(graph, pending, options);
    for (std::size_t p = 0; p < d.size(); ++p) {
      if (d[p] == kInfinity) throw disconnected("no path between ball members");
      gap = std::max(gap, d[p] - solver.cost()[where[p]]);
      solver.set_cost(where[p], d[p]);
      exact[where[p]] = 1;
    }
  }
}

}  // namespace

CurvatureSample ollivier_mesoscopic(const GeoGraph& graph, NodeId x, NodeId y, double delta,
                                    const MesoscopicOptions& options) {
  if (!(delta > 0.0)) throw RangeError("ball radius delta must be positive");
  const Ball bx = ball(graph, x, delta);
  const Ball by = ball(graph, y, delta);

  double w = 0.0;
  std::optional<DistanceMatrix> bounds;
  if (options.lazy_costs && bx.size() * by.size() >= options.lazy_min_pairs) {
    bounds = manifold_lower_bounds(graph, bx, by);
  }
  if (bounds) {
    // Every member is reachable from its centre, so x ~ y settles connectivity.
    const NodePair probe{x, y};
    const double dxy = pair_distances(graph, std::span(&probe, 1), options.matrix)[0];
    if (dxy == kInfinity) {
      throw disconnected("no path from " + std::to_string(x) + " to " + std::to_string(y));
    }
    // Ball members are within delta of their centre, so no cost exceeds this.
    const double ceiling = 2.0 * (delta + kBallSlack * std::max(1.0, delta)) + dxy;
    w = lazy_wasserstein(graph, *bounds, ceiling, options.matrix);
  } else {
    DistanceMatrix dm;
    try {
      dm = distance_matrix(graph, bx, by, options.matrix);
    } catch (const UnreachableError& e) {
      throw disconnected(e.what());
    }
    w = wasserstein_between_balls(bx, by, dm);
  }

  CurvatureSample s;
  s.delta = delta;
  s.ball_x_size = bx.size();
  s.ball_y_size = by.size();
  s.wasserstein = w;
  s.kappa = 1.0 - s.wasserstein / delta;
  s.kappa_rescaled = s.kappa / (delta * delta);
  return s;
}

double ollivier_classic(const GeoGraph& graph, NodeId x, NodeId y) {
  require_edge(graph, x, y);
  const auto nx = graph.neighbors(x);
  const auto ny = graph.neighbors(y);
  const std::size_t m = nx.size();
  const std::size_t k = ny.size();

  TransportProblem p;
  p.rows = m;
  p.cols = k;
  p.cost.resize(m * k);
  for (std::size_t i = 0; i < m; ++i) {
    const auto hops = hop_distances(graph, nx[i]);
    for (std::size_t j = 0; j < k; ++j) p.cost[i * k + j] = static_cast<double>(hops[ny[j]]);
  }
  p.source_mass.assign(m, 1.0 / static_cast<double>(m));
  p.sink_mass.assign(k, 1.0 / static_cast<double>(k));
  // The masses above need not sum to exactly the same double; rebalance the sink side.
  double sa = 0.0, sb = 0.0;
  for (double a : p.source_mass) sa += a;
  for (double b : p.sink_mass) sb += b;
  p.sink_mass.back() += sa - sb;
  const auto sol = solve_emd(p);
  if (sol.status != TransportStatus::Optimal) throw InternalError("classic curvature: transport failed");
  return 1.0 - sol.value;
}

std::size_t triangles_on_edge(const GeoGraph& graph, NodeId i, NodeId j) {
  const auto a = graph.neighbors(i);
  const auto b = graph.neighbors(j);
  std::size_t common = 0;
  auto p = a.begin();
  auto q = b.begin();
  while (p != a.end() && q != b.end()) {
    if (*p < *q) {
      ++p;
    } else if (*q < *p) {
      ++q;
    } else {
      ++common;
      ++p;
      ++q;
    }
  }
  return common;
}

double forman(const GeoGraph& graph, NodeId i, NodeId j, FormanOrder order) {
  require_edge(graph, i, j);
  const double f1 = 4.0 - static_cast<double>(graph.degree(i) + graph.degree(j));
  if (order == FormanOrder::F1) return f1;
  return f1 + 3.0 * static_cast<double>(triangles_on_edge(graph, i, j));
}

RicciTarget ricci_target(const Surface& surface) {
  const double D = surface.dimension();
  // Ric(v,v) = (D - 1) K for constant sectional curvature K.
  const double ric = (D - 1.0) * surface.curvature();
  return {ric / (2.0 * (D + 2.0))};
}

}  // namespace orc
