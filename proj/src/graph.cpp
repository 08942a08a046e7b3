#include "orcurv/graph.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "orcurv/errors.hpp"

namespace orc {

namespace {

constexpr double kThresholdSlack = 1e-12;
constexpr double kGridSlack = 1e-9;
constexpr std::size_t kMaxGridCells = std::size_t{1} << 22;

double scheme_weight(WeightScheme scheme, double d, double epsilon) {
  switch (scheme) {
    case WeightScheme::ManifoldDistance: return d;
    case WeightScheme::EpsilonConstant: return epsilon;
    case WeightScheme::Unit: return 1.0;
  }
  return d;
}

int resolve_threads(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

/// Uniform grid over Euclidean proxy positions. Each surface point contributes
/// one or more proxies (periodic copies, unit vectors, group images); a query
/// disc around point i that contains every proxy of every j with
/// d_M(i, j) <= epsilon yields a candidate superset of the true neighbours.
class ProxyGrid {
 public:
  struct Proxy {
    std::array<double, 3> pos;
    NodeId node;
  };

  ProxyGrid(std::vector<Proxy> proxies, double cell) : proxies_(std::move(proxies)) {
    lo_ = {0.0, 0.0, 0.0};
    std::array<double, 3> hi{0.0, 0.0, 0.0};
    if (!proxies_.empty()) {
      lo_ = hi = proxies_.front().pos;
      for (const auto& p : proxies_) {
        for (int a = 0; a < 3; ++a) {
          lo_[a] = std::min(lo_[a], p.pos[a]);
          hi[a] = std::max(hi[a], p.pos[a]);
        }
      }
    }
    cell_ = std::max(cell, 1e-12);
    for (;;) {
      std::size_t total = 1;
      for (int a = 0; a < 3; ++a) {
        dims_[a] = static_cast<std::size_t>(std::floor((hi[a] - lo_[a]) / cell_)) + 1;
        total *= dims_[a];
      }
      if (total <= kMaxGridCells) break;
      cell_ *= 2.0;
    }
    const std::size_t cells = dims_[0] * dims_[1] * dims_[2];
    start_.assign(cells + 1, 0);
    for (const auto& p : proxies_) ++start_[cell_of(p.pos) + 1];
    for (std::size_t c = 0; c < cells; ++c) start_[c + 1] += start_[c];
    order_.resize(proxies_.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t k = 0; k < proxies_.size(); ++k) order_[fill[cell_of(proxies_[k].pos)]++] = k;
  }

  template <typename Visit>
  void query(const std::array<double, 3>& center, double radius, Visit&& visit) const {
    std::array<std::size_t, 3> from{}, to{};
    for (int a = 0; a < 3; ++a) {
      const double lo = (center[a] - radius - lo_[a]) / cell_;
      const double hi = (center[a] + radius - lo_[a]) / cell_;
      if (hi < 0.0 || lo > static_cast<double>(dims_[a] - 1) + 1.0) return;
      from[a] = lo <= 0.0 ? 0 : std::min(dims_[a] - 1, static_cast<std::size_t>(lo));
      to[a] = hi <= 0.0 ? 0 : std::min(dims_[a] - 1, static_cast<std::size_t>(hi));
    }
    for (std::size_t x = from[0]; x <= to[0]; ++x) {
      for (std::size_t y = from[1]; y <= to[1]; ++y) {
        for (std::size_t z = from[2]; z <= to[2]; ++z) {
          const std::size_t c = (x * dims_[1] + y) * dims_[2] + z;
          for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) visit(proxies_[order_[k]].node);
        }
      }
    }
  }

 private:
  std::size_t cell_of(const std::array<double, 3>& p) const {
    std::array<std::size_t, 3> idx{};
    for (int a = 0; a < 3; ++a) {
      const double t = (p[a] - lo_[a]) / cell_;
      idx[a] = std::min(dims_[a] - 1, static_cast<std::size_t>(std::max(0.0, t)));
    }
    return (idx[0] * dims_[1] + idx[1]) * dims_[2] + idx[2];
  }

  std::vector<Proxy> proxies_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> start_;
  std::array<double, 3> lo_{};
  std::array<std::size_t, 3> dims_{1, 1, 1};
  double cell_ = 1.0;
};

struct QueryDisc {
  std::array<double, 3> center;
  double radius;
};

/// Proxies for every node plus a per-node query disc.
struct GridSetup {
  std::vector<ProxyGrid::Proxy> proxies;
  std::vector<QueryDisc> queries;
  double max_radius = 0.0;
};

GridSetup grid_setup(const PreparedPoints& pts, double epsilon) {
  GridSetup s;
  const std::size_t n = pts.size();
  s.queries.resize(n);
  switch (pts.surface().kind) {
    case SurfaceKind::FlatTorus2D: {
      const double r = epsilon + kGridSlack;
      for (std::size_t i = 0; i < n; ++i) {
        const auto p = pts.point(i);
        s.queries[i] = {{p.c1, p.c2, 0.0}, r};
        for (int du = -1; du <= 1; ++du) {
          for (int dv = -1; dv <= 1; ++dv) {
            const double u = p.c1 + du;
            const double v = p.c2 + dv;
            if (u < -r || u > 1.0 + r || v < -r || v > 1.0 + r) continue;
            s.proxies.push_back({{u, v, 0.0}, static_cast<NodeId>(i)});
          }
        }
      }
      s.max_radius = r;
      break;
    }
    case SurfaceKind::UnitSphere2D: {
      const double r = 2.0 * std::sin(std::min(epsilon, std::numbers::pi) / 2.0) + kGridSlack;
      for (std::size_t i = 0; i < n; ++i) {
        s.queries[i] = {pts.unit_vector(i), r};
        s.proxies.push_back({pts.unit_vector(i), static_cast<NodeId>(i)});
      }
      s.max_radius = r;
      break;
    }
    case SurfaceKind::BolzaSurface: {
      // A hyperbolic disc of radius eps about z is the Euclidean disc with
      // centre z(1 - t^2)/(1 - t^2|z|^2) and radius t(1 - |z|^2)/(1 - t^2|z|^2),
      // t = tanh(eps/2).
      const double t = std::tanh(epsilon / 2.0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto z = as_complex(pts.point(i));
        const double zz = std::norm(z);
        const double den = 1.0 - t * t * zz;
        const auto c = z * ((1.0 - t * t) / den);
        const double r = t * (1.0 - zz) / den + kGridSlack;
        s.queries[i] = {{c.real(), c.imag(), 0.0}, r};
        s.max_radius = std::max(s.max_radius, r);
        for (std::size_t g = 0; g < bolza::kGroupSize; ++g) {
          const auto w = pts.image(i, g);
          s.proxies.push_back({{w.real(), w.imag(), 0.0}, static_cast<NodeId>(i)});
        }
      }
      break;
    }
  }
  return s;
}

using Rows = std::vector<std::vector<Edge>>;

GeoGraph assemble(const Rows& rows, std::vector<SurfacePoint> nodes, GraphMeta meta) {
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  std::vector<Edge> edges;
  edges.reserve(total);
  for (const auto& r : rows) edges.insert(edges.end(), r.begin(), r.end());
  const std::size_t n = nodes.size();
  return GeoGraph::from_edges(n, edges, std::move(meta), std::move(nodes));
}

GraphMeta threshold_meta(const Surface& surface, std::size_t n, double epsilon, WeightScheme scheme) {
  GraphMeta meta;
  meta.surface = surface;
  meta.sampled = n;
  meta.epsilon = epsilon;
  meta.scheme = scheme;
  return meta;
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw RangeError("connection radius must be positive and finite");
  }
}

}  // namespace

std::string_view scheme_tag(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::ManifoldDistance: return "distance";
    case WeightScheme::EpsilonConstant: return "epsilon";
    case WeightScheme::Unit: return "unit";
  }
  return "unknown";
}

WeightScheme parse_weight_scheme(std::string_view tag) {
  if (tag == "distance" || tag == "ManifoldDistance") return WeightScheme::ManifoldDistance;
  if (tag == "epsilon" || tag == "EpsilonConstant") return WeightScheme::EpsilonConstant;
  if (tag == "unit" || tag == "Unit") return WeightScheme::Unit;
  throw DomainError("unknown weight scheme '" + std::string(tag) + "'");
}

// ---------------------------------------------------------------------------

GeoGraph GeoGraph::from_edges(std::size_t node_count, std::span<const Edge> edges, GraphMeta meta,
                              std::vector<SurfacePoint> nodes) {
  if (!nodes.empty() && nodes.size() != node_count) {
    throw std::invalid_argument("coordinate count does not match node count");
  }
  GeoGraph g;
  g.meta_ = std::move(meta);
  g.nodes_ = std::move(nodes);
  g.offsets_.assign(node_count + 1, 0);
  for (const auto& e : edges) {
    if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= node_count ||
        static_cast<std::size_t>(e.v) >= node_count) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (e.u == e.v) throw std::invalid_argument("self-loop at node " + std::to_string(e.u));
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  for (std::size_t v = 0; v < node_count; ++v) g.offsets_[v + 1] += g.offsets_[v];
  g.targets_.resize(2 * edges.size());
  g.weights_.resize(2 * edges.size());
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : edges) {
    g.targets_[fill[e.u]] = e.v;
    g.weights_[fill[e.u]++] = e.weight;
    g.targets_[fill[e.v]] = e.u;
    g.weights_[fill[e.v]++] = e.weight;
  }
  std::vector<std::pair<NodeId, double>> scratch;
  for (std::size_t v = 0; v < node_count; ++v) {
    const std::size_t b = g.offsets_[v];
    const std::size_t e = g.offsets_[v + 1];
    scratch.clear();
    for (std::size_t k = b; k < e; ++k) scratch.emplace_back(g.targets_[k], g.weights_[k]);
    std::sort(scratch.begin(), scratch.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    for (std::size_t k = b; k < e; ++k) {
      if (k > b && scratch[k - b].first == scratch[k - b - 1].first) {
        throw std::invalid_argument("duplicate edge " + std::to_string(v) + "-" +
                                    std::to_string(scratch[k - b].first));
      }
      g.targets_[k] = scratch[k - b].first;
      g.weights_[k] = scratch[k - b].second;
    }
  }
  return g;
}

bool GeoGraph::has_edge(NodeId u, NodeId v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

double GeoGraph::edge_weight(NodeId u, NodeId v) const {
  if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= node_count() ||
      static_cast<std::size_t>(v) >= node_count()) {
    throw MissingEdgeError("edge endpoint out of range");
  }
  const auto nb = neighbors(u);
  const auto it = std::lower_bound(nb.begin(), nb.end(), v);
  if (it == nb.end() || *it != v) {
    throw MissingEdgeError("no edge " + std::to_string(u) + "-" + std::to_string(v));
  }
  return weights(u)[it - nb.begin()];
}

std::vector<Edge> GeoGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (std::size_t u = 0; u < node_count(); ++u) {
    const auto nb = neighbors(static_cast<NodeId>(u));
    const auto w = weights(static_cast<NodeId>(u));
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (static_cast<std::size_t>(nb[k]) > u) out.push_back({static_cast<NodeId>(u), nb[k], w[k]});
    }
  }
  return out;
}

bool operator==(const GeoGraph& a, const GeoGraph& b) {
  return a.offsets_ == b.offsets_ && a.targets_ == b.targets_ && a.weights_ == b.weights_ &&
         a.nodes_ == b.nodes_;
}

// ---------------------------------------------------------------------------

GeoGraph build_threshold_graph_reference(const Surface& surface, std::vector<SurfacePoint> nodes,
                                         double epsilon, WeightScheme scheme) {
  check_epsilon(epsilon);
  for (const auto& p : nodes) validate_point(surface, p);
  const std::size_t n = nodes.size();
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(surface, nodes[i], nodes[j]);
      if (d <= epsilon + kThresholdSlack) {
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j),
                         scheme_weight(scheme, d, epsilon)});
      }
    }
  }
  auto meta = threshold_meta(surface, n, epsilon, scheme);
  return GeoGraph::from_edges(n, edges, std::move(meta), std::move(nodes));
}

namespace {

GeoGraph threshold_graph(const Surface& surface, std::vector<SurfacePoint> nodes, double epsilon,
                         WeightScheme scheme, const BuildOptions& options, GraphMeta meta) {
  check_epsilon(epsilon);
  for (const auto& p : nodes) validate_point(surface, p);
  const PreparedPoints pts(surface, nodes);
  const std::size_t n = nodes.size();
  const int threads = resolve_threads(options.threads);
  Rows rows(n);

  if (options.search == NeighborSearch::BruteForce) {
#pragma omp parallel for schedule(dynamic, 32) num_threads(threads)
    for (std::size_t i = 0; i < n; ++i) {
      auto& row = rows[i];
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = pts.distance(i, j);
        if (d <= epsilon + kThresholdSlack) {
          row.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j),
                         scheme_weight(scheme, d, epsilon)});
        }
      }
    }
  } else {
    const GridSetup setup = grid_setup(pts, epsilon);
    const ProxyGrid grid(setup.proxies, setup.max_radius);
#pragma omp parallel num_threads(threads)
    {
      std::vector<std::size_t> stamp(n, SIZE_MAX);
      std::vector<NodeId> candidates;
#pragma omp for schedule(dynamic, 32)
      for (std::size_t i = 0; i < n; ++i) {
        candidates.clear();
        grid.query(setup.queries[i].center, setup.queries[i].radius, [&](NodeId j) {
          if (static_cast<std::size_t>(j) > i && stamp[j] != i) {
            stamp[j] = i;
            candidates.push_back(j);
          }
        });
        std::sort(candidates.begin(), candidates.end());
        auto& row = rows[i];
        for (NodeId j : candidates) {
          const double d = pts.distance(i, static_cast<std::size_t>(j));
          if (d <= epsilon + kThresholdSlack) {
            row.push_back({static_cast<NodeId>(i), j, scheme_weight(scheme, d, epsilon)});
          }
        }
      }
    }
  }
  return assemble(rows, std::move(nodes), std::move(meta));
}

}  // namespace

GeoGraph build_threshold_graph(const Surface& surface, std::vector<SurfacePoint> nodes,
                               double epsilon, WeightScheme scheme, const BuildOptions& options) {
  auto meta = threshold_meta(surface, nodes.size(), epsilon, scheme);
  return threshold_graph(surface, std::move(nodes), epsilon, scheme, options, std::move(meta));
}

GeoGraph build_rgg(const Surface& surface, std::span<const SurfacePoint> points,
                   const ProbePair& probe, double epsilon, WeightScheme scheme,
                   const BuildOptions& options, std::uint64_t seed) {
  std::vector<SurfacePoint> nodes(points.begin(), points.end());
  nodes.push_back(probe.x);
  nodes.push_back(probe.y);
  GraphMeta meta = threshold_meta(surface, points.size(), epsilon, scheme);
  meta.seed = seed;
  return threshold_graph(surface, std::move(nodes), epsilon, scheme, options, std::move(meta));
}

// ---------------------------------------------------------------------------

double ScalingSchedule::epsilon() const {
  return c_eps * std::pow(static_cast<double>(n), -alpha);
}

double ScalingSchedule::delta() const {
  return c_delta * std::pow(static_cast<double>(n), -beta);
}

void ScalingSchedule::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("scaling exponents must be positive");
  if (!(c_eps > 0.0) || !(c_delta > 0.0)) throw DomainError("scaling prefactors must be positive");
  if (n == 0) throw DomainError("graph size must be positive");
  if (epsilon() > delta() * (1.0 + 1e-12)) {
    throw DomainError("schedule violates epsilon_n <= delta_n (epsilon=" +
                      std::to_string(epsilon()) + ", delta=" + std::to_string(delta()) + ")");
  }
}

std::string_view density_tag(DensityClass c) {
  switch (c) {
    case DensityClass::Dense: return "dense";
    case DensityClass::Sparse: return "sparse";
    case DensityClass::Ultrasparse: return "ultrasparse";
  }
  return "unknown";
}

RegimeReport check_regime(double alpha, double beta, WeightScheme scheme) {
  constexpr double D = 2.0;
  constexpr double tie = 1e-12;
  RegimeReport r;
  r.weighted_ok = beta > 0.0 && beta <= alpha && alpha + 2.0 * beta < 1.0 / D;
  r.weighted_equal_radii_ok =
      std::abs(alpha - beta) <= tie && alpha > 0.0 && alpha < 1.0 / (3.0 * D);
  r.unweighted_ok = beta > 0.0 && beta < 1.0 / 9.0 && 3.0 * beta < alpha &&
                    alpha < (1.0 - 3.0 * beta) / 2.0;
  switch (scheme) {
    case WeightScheme::ManifoldDistance: r.scheme_ok = r.weighted_ok; break;
    case WeightScheme::EpsilonConstant: r.scheme_ok = r.unweighted_ok; break;
    case WeightScheme::Unit: r.scheme_ok = false; break;
  }
  r.degree_exponent = 1.0 - alpha * D;
  if (std::abs(alpha) <= tie) {
    r.density_class = DensityClass::Dense;
  } else if (alpha >= 1.0 / D - tie) {
    r.density_class = DensityClass::Ultrasparse;
  } else {
    r.density_class = DensityClass::Sparse;
  }
  return r;
}

double ball_volume(const Surface& surface, double r) {
  switch (surface.kind) {
    case SurfaceKind::FlatTorus2D: return std::numbers::pi * r * r;
    case SurfaceKind::UnitSphere2D: return 2.0 * std::numbers::pi * (1.0 - std::cos(r));
    case SurfaceKind::BolzaSurface: return 2.0 * std::numbers::pi * (std::cosh(r) - 1.0);
  }
  return 0.0;
}

double expected_degree(const Surface& surface, double n, double epsilon) {
  const double limit = injectivity_scale(surface);
  const bool ok = surface.kind == SurfaceKind::UnitSphere2D ? epsilon <= limit : epsilon < limit;
  if (!(epsilon > 0.0) || !ok) {
    throw RangeError("epsilon " + std::to_string(epsilon) + " is not a valid ball radius on " +
                     std::string(surface_tag(surface.kind)));
  }
  return n * ball_volume(surface, epsilon) / surface.volume();
}

}  // namespace orc
