#include "orcurv/paths.hpp"

#include <omp.h>

#include <algorithm>
#include <cstring>
#include <exception>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <queue>
#include <stdexcept>

#include "orcurv/errors.hpp"
#include "orcurv/sampling.hpp"

namespace orc {

namespace {

using HeapEntry = std::pair<double, NodeId>;

/// Reusable per-thread state for repeated single-source searches. Only touched
/// entries are reset between runs.
class SearchWorkspace {
 public:
  explicit SearchWorkspace(std::size_t n) : dist_(n, kInfinity), settled_(n, 0) {}

  void reset() {
    for (NodeId v : touched_) {
      dist_[v] = kInfinity;
      settled_[v] = 0;
    }
    touched_.clear();
    heap_.clear();
  }

  void push(NodeId v, double g, double key) {
    if (dist_[v] == kInfinity) touched_.push_back(v);
    dist_[v] = g;
    heap_.emplace_back(key, v);
    std::push_heap(heap_.begin(), heap_.end(), std::greater<>{});
  }

  bool empty() const { return heap_.empty(); }

  HeapEntry pop() {
    std::pop_heap(heap_.begin(), heap_.end(), std::greater<>{});
    const HeapEntry top = heap_.back();
    heap_.pop_back();
    return top;
  }

  double dist(NodeId v) const { return dist_[v]; }
  bool settled(NodeId v) const { return settled_[v] != 0; }
  void settle(NodeId v) { settled_[v] = 1; }

 private:
  std::vector<double> dist_;
  std::vector<char> settled_;
  std::vector<NodeId> touched_;
  std::vector<HeapEntry> heap_;
};

void check_node(const GeoGraph& graph, NodeId v) {
  if (v < 0 || static_cast<std::size_t>(v) >= graph.node_count()) {
    throw std::out_of_range("node " + std::to_string(v) + " not in graph");
  }
}

/// Multi-target search from `source`; writes d_G(source, targets[j]) into out[j].
/// `h(v)` is an admissible lower bound to the nearest target (0 for Dijkstra).
/// `target_slot[v]` is the column of v or -1. Returns false if some target is
/// unreachable (its entry stays infinite).
template <class Heuristic>
bool search_row(const GeoGraph& graph, NodeId source, Heuristic&& h,
                std::span<const std::int32_t> target_slot, std::size_t target_count,
                SearchWorkspace& ws, std::span<double> out, SearchStats& stats) {
  ws.reset();
  std::fill(out.begin(), out.end(), kInfinity);
  std::size_t remaining = target_count;
  ws.push(source, 0.0, h(source));
  ++stats.pushes;
  while (!ws.empty()) {
    const auto [key, v] = ws.pop();
    if (ws.settled(v)) continue;
    ws.settle(v);
    ++stats.settled;
    const double gv = ws.dist(v);
    if (const auto slot = target_slot[v]; slot >= 0) {
      out[slot] = gv;
      if (--remaining == 0) return true;
    }
    const auto nb = graph.neighbors(v);
    const auto w = graph.weights(v);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const NodeId u = nb[k];
      const double gu = gv + w[k];
      if (gu < ws.dist(u)) {
        ws.push(u, gu, gu + h(u));
        ++stats.pushes;
      }
    }
  }
  return remaining == 0;
}

/// max(0, d_M(z, c) - r) / s for every node z; see distance_matrix.
/// Graph cost of one unit of manifold length, or 0 when no lower bound exists.
double manifold_scale(const GeoGraph& graph) {
  const auto& meta = graph.meta();
  if (!graph.has_coordinates() || !meta.surface) return 0.0;
  switch (meta.scheme) {
    case WeightScheme::ManifoldDistance:
    case WeightScheme::EpsilonConstant: return 1.0;
    case WeightScheme::Unit: return meta.epsilon > 0.0 ? meta.epsilon : 0.0;
  }
  return 0.0;
}

// The (1 - 1e-9) factor absorbs rounding in the triangle inequality.
constexpr double kBoundShrink = 1.0 - 1e-9;

// Up to this many targets, A* aims at the nearest one exactly.
constexpr std::size_t kPointTargets = 4;

std::vector<double> target_heuristic(const GeoGraph& graph, const Ball& to) {
  const double scale = manifold_scale(graph);
  if (scale == 0.0) return {};
  const PreparedPoints pts(*graph.meta().surface, graph.nodes());
  const auto c = static_cast<std::size_t>(to.center);
  double reach = 0.0;
  for (const auto& m : to.members) reach = std::max(reach, pts.distance(c, m.node));
  std::vector<double> h(graph.node_count());
  const double factor = kBoundShrink / scale;
  for (std::size_t z = 0; z < h.size(); ++z) {
    h[z] = std::max(0.0, pts.distance(z, c) - reach) * factor;
  }
  return h;
}

}  // namespace

bool Ball::contains(NodeId v) const {
  return std::binary_search(members.begin(), members.end(), BallMember{v, 0.0},
                            [](const BallMember& a, const BallMember& b) { return a.node < b.node; });
}

Ball ball(const GeoGraph& graph, NodeId center, double radius) {
  check_node(graph, center);
  if (!(radius >= 0.0)) throw RangeError("ball radius must be non-negative");
  const double limit = radius + kBallSlack * std::max(1.0, radius);
  Ball b{center, radius, {}};
  SearchWorkspace ws(graph.node_count());
  ws.push(center, 0.0, 0.0);
  while (!ws.empty()) {
    const auto [g, v] = ws.pop();
    if (ws.settled(v)) continue;
    if (g > limit) break;
    ws.settle(v);
    b.members.push_back({v, g});
    const auto nb = graph.neighbors(v);
    const auto w = graph.weights(v);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const double gu = g + w[k];
      if (gu <= limit && gu < ws.dist(nb[k])) ws.push(nb[k], gu, gu);
    }
  }
  std::sort(b.members.begin(), b.members.end(),
            [](const BallMember& l, const BallMember& r) { return l.node < r.node; });
  return b;
}

DistanceMatrix::DistanceMatrix(std::vector<NodeId> row_nodes, std::vector<NodeId> col_nodes)
    : row_nodes_(std::move(row_nodes)),
      col_nodes_(std::move(col_nodes)),
      data_(row_nodes_.size() * col_nodes_.size(), 0.0) {}

namespace {

std::vector<NodeId> member_ids(const Ball& b) {
  std::vector<NodeId> ids;
  ids.reserve(b.size());
  for (const auto& m : b.members) ids.push_back(m.node);
  return ids;
}

}  // namespace

DistanceMatrix distance_matrix(const GeoGraph& graph, const Ball& from, const Ball& to,
                               const MatrixOptions& options, SearchStats* stats) {
  DistanceMatrix out(member_ids(from), member_ids(to));
  const std::size_t n = graph.node_count();
  std::vector<std::int32_t> slot(n, -1);
  for (std::size_t j = 0; j < out.cols(); ++j) {
    check_node(graph, out.col_nodes()[j]);
    slot[out.col_nodes()[j]] = static_cast<std::int32_t>(j);
  }
  for (NodeId v : out.row_nodes()) check_node(graph, v);

  const std::vector<double> heuristic =
      options.method == SearchMethod::AStar ? target_heuristic(graph, to) : std::vector<double>{};
  const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
  const auto rows = static_cast<std::int64_t>(out.rows());

  SearchStats total;
  std::exception_ptr failure;
  std::int64_t failed_row = rows;
#pragma omp parallel num_threads(threads)
  {
    SearchWorkspace ws(n);
    SearchStats local;
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < rows; ++i) {
      const NodeId src = out.row_nodes()[i];
      const bool found = heuristic.empty()
                             ? search_row(graph, src, [](NodeId) { return 0.0; }, slot, out.cols(), ws, out.row(i), local)
                             : search_row(graph, src, [&](NodeId v) { return heuristic[v]; }, slot, out.cols(), ws,
                                          out.row(i), local);
      if (!found) {
#pragma omp critical(orc_matrix_failure)
        if (i < failed_row) {
          failed_row = i;
          const auto r = out.row(i);
          const auto miss = std::find(r.begin(), r.end(), kInfinity) - r.begin();
          failure = std::make_exception_ptr(UnreachableError(src, out.col_nodes()[miss]));
        }
      }
    }
#pragma omp critical(orc_matrix_stats)
    {
      total.settled += local.settled;
      total.pushes += local.pushes;
    }
  }
  if (failure) std::rethrow_exception(failure);
  if (stats) *stats = total;
  return out;
}

std::optional<DistanceMatrix> manifold_lower_bounds(const GeoGraph& graph, const Ball& from, const Ball& to) {
  const double scale = manifold_scale(graph);
  if (scale == 0.0) return std::nullopt;
  DistanceMatrix out(member_ids(from), member_ids(to));
  for (NodeId v : out.row_nodes()) check_node(graph, v);
  for (NodeId v : out.col_nodes()) check_node(graph, v);
  const Surface& surface = *graph.meta().surface;
  std::vector<SurfacePoint> pts;
  pts.reserve(out.rows() + out.cols());
  for (NodeId v : out.row_nodes()) pts.push_back(graph.nodes()[v]);
  for (NodeId v : out.col_nodes()) pts.push_back(graph.nodes()[v]);
  const PreparedPoints prepared(surface, pts);
  const double factor = kBoundShrink / scale;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < out.cols(); ++j) row[j] = prepared.distance(i, out.rows() + j) * factor;
  }
  return out;
}

std::vector<double> pair_distances(const GeoGraph& graph, std::span<const NodePair> pairs,
                                   const MatrixOptions& options, SearchStats* stats) {
  const std::size_t n = graph.node_count();
  for (const auto& [u, v] : pairs) {
    check_node(graph, u);
    check_node(graph, v);
  }
  // Group by source so that each source runs one multi-target search.
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pairs[a].first < pairs[b].first; });
  std::vector<std::size_t> group_start;
  for (std::size_t a = 0; a < order.size(); ++a) {
    if (a == 0 || pairs[order[a]].first != pairs[order[a - 1]].first) group_start.push_back(a);
  }
  group_start.push_back(order.size());

  const double scale = options.method == SearchMethod::AStar ? manifold_scale(graph) : 0.0;
  std::optional<PreparedPoints> pts;
  if (scale > 0.0) pts.emplace(*graph.meta().surface, graph.nodes());
  const double factor = scale > 0.0 ? kBoundShrink / scale : 0.0;

  std::vector<double> result(pairs.size(), kInfinity);
  const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
  const auto groups = static_cast<std::int64_t>(group_start.size() - 1);
  SearchStats total;
#pragma omp parallel num_threads(threads)
  {
    SearchWorkspace ws(n);
    SearchStats local;
    std::vector<std::int32_t> slot(n, -1);
    std::vector<NodeId> targets;
    std::vector<double> found;
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t g = 0; g < groups; ++g) {
      targets.clear();
      const NodeId src = pairs[order[group_start[g]]].first;
      for (std::size_t a = group_start[g]; a < group_start[g + 1]; ++a) {
        const NodeId t = pairs[order[a]].second;
        if (pts && t != src && graph.has_edge(src, t)) {
          // An edge no longer than the manifold bound is a shortest path.
          const double w = graph.edge_weight(src, t);
          if (w <= pts->distance(src, t) / scale * (1.0 + 1e-14)) {
            result[order[a]] = w;
            continue;
          }
        }
        if (slot[t] < 0) {
          slot[t] = static_cast<std::int32_t>(targets.size());
          targets.push_back(t);
        }
      }
      if (targets.empty()) continue;
      found.assign(targets.size(), kInfinity);
      if (pts && targets.size() <= kPointTargets) {
        const auto h = [&](NodeId z) {
          double best = kInfinity;
          for (NodeId t : targets) best = std::min(best, pts->distance(z, t));
          return best * factor;
        };
        search_row(graph, src, h, slot, targets.size(), ws, found, local);
      } else if (pts) {
        // Many targets: one disc around the first covers them all.
        const NodeId c = targets.front();
        double reach = 0.0;
        for (NodeId t : targets) reach = std::max(reach, pts->distance(c, t));
        const auto h = [&](NodeId z) { return std::max(0.0, pts->distance(z, c) - reach) * factor; };
        search_row(graph, src, h, slot, targets.size(), ws, found, local);
      } else {
        search_row(graph, src, [](NodeId) { return 0.0; }, slot, targets.size(), ws, found, local);
      }
      for (std::size_t a = group_start[g]; a < group_start[g + 1]; ++a) {
        const auto t = slot[pairs[order[a]].second];
        if (t >= 0) result[order[a]] = found[t];
      }
      for (NodeId t : targets) slot[t] = -1;
    }
#pragma omp critical(orc_pair_stats)
    {
      total.settled += local.settled;
      total.pushes += local.pushes;
    }
  }
  if (stats) *stats = total;
  return result;
}

std::vector<double> shortest_distances(const GeoGraph& graph, NodeId source) {
  check_node(graph, source);
  std::vector<double> dist(graph.node_count(), kInfinity);
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>> pq;
  dist[source] = 0.0;
  pq.emplace(0.0, source);
  while (!pq.empty()) {
    const auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    const auto nb = graph.neighbors(v);
    const auto w = graph.weights(v);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const double nd = d + w[k];
      if (nd < dist[nb[k]]) {
        dist[nb[k]] = nd;
        pq.emplace(nd, nb[k]);
      }
    }
  }
  return dist;
}

DistanceMatrix distance_matrix_reference(const GeoGraph& graph, const Ball& from, const Ball& to) {
  DistanceMatrix out(member_ids(from), member_ids(to));
  for (std::size_t i = 0; i < out.rows(); ++i) {
    const auto dist = shortest_distances(graph, out.row_nodes()[i]);
    for (std::size_t j = 0; j < out.cols(); ++j) {
      const double d = dist[out.col_nodes()[j]];
      if (d == kInfinity) throw UnreachableError(out.row_nodes()[i], out.col_nodes()[j]);
      out.at(i, j) = d;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {
constexpr char kMatrixMagic[8] = {'O', 'R', 'C', 'D', 'M', 'A', 'T', '1'};
}

void write_distance_matrix(const DistanceMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  const std::uint64_t rows = m.rows();
  const std::uint64_t cols = m.cols();
  out.write(kMatrixMagic, sizeof kMatrixMagic);
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  out.write(reinterpret_cast<const char*>(m.data().data()),
            static_cast<std::streamsize>(m.data().size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(m.row_nodes().data()),
            static_cast<std::streamsize>(rows * sizeof(NodeId)));
  out.write(reinterpret_cast<const char*>(m.col_nodes().data()),
            static_cast<std::streamsize>(cols * sizeof(NodeId)));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

DistanceMatrix read_distance_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  char magic[8];
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in || std::memcmp(magic, kMatrixMagic, sizeof magic) != 0) {
    throw ParseError("not a distance matrix file: '" + path.string() + "'", 0);
  }
  std::vector<double> data(rows * cols);
  std::vector<NodeId> row_nodes(rows);
  std::vector<NodeId> col_nodes(cols);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  in.read(reinterpret_cast<char*>(row_nodes.data()), static_cast<std::streamsize>(rows * sizeof(NodeId)));
  in.read(reinterpret_cast<char*>(col_nodes.data()), static_cast<std::streamsize>(cols * sizeof(NodeId)));
  if (!in) throw ParseError("truncated distance matrix file '" + path.string() + "'", 0);
  DistanceMatrix m(std::move(row_nodes), std::move(col_nodes));
  for (std::size_t i = 0; i < rows; ++i) {
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(i * cols), cols, m.row(i).begin());
  }
  return m;
}

// ---------------------------------------------------------------------------

StretchSummary stretch_stats(const GeoGraph& graph, std::size_t pair_sample_size,
                             const StretchOptions& options) {
  const auto& meta = graph.meta();
  if (!graph.has_coordinates() || !meta.surface) {
    throw std::invalid_argument("stretch statistics need node coordinates");
  }
  if (meta.scheme == WeightScheme::Unit) {
    throw std::invalid_argument("stretch statistics need distance or epsilon weights");
  }
  StretchSummary s;
  const std::size_t n = graph.node_count();
  if (n < 2 || pair_sample_size == 0) return s;

  const PreparedPoints pts(*meta.surface, graph.nodes());
  Rng rng(options.seed);
  std::vector<std::size_t> eligible;
  double ratio_sum = 0.0;
  const std::size_t max_sources = 20 * (pair_sample_size / std::max<std::size_t>(1, options.pairs_per_source) + 1);

  for (std::size_t attempt = 0; attempt < max_sources && s.pairs < pair_sample_size; ++attempt) {
    const auto u = static_cast<std::size_t>(rng() % n);
    eligible.clear();
    for (std::size_t v = 0; v < n; ++v) {
      if (v == u) continue;
      const double dm = pts.distance(std::min(u, v), std::max(u, v));
      if (dm > 0.0 && dm >= options.min_manifold && dm <= options.max_manifold) eligible.push_back(v);
    }
    if (eligible.empty()) continue;
    const auto dist = shortest_distances(graph, static_cast<NodeId>(u));
    const std::size_t take =
        std::min({options.pairs_per_source, eligible.size(), pair_sample_size - s.pairs});
    // Partial Fisher-Yates: the first `take` entries become a uniform sample.
    for (std::size_t k = 0; k < take; ++k) {
      const std::size_t pick = k + static_cast<std::size_t>(rng() % (eligible.size() - k));
      std::swap(eligible[k], eligible[pick]);
      const std::size_t v = eligible[k];
      const double dg = dist[v];
      if (dg == kInfinity) {
        ++s.skipped;
        continue;
      }
      const double dm = pts.distance(std::min(u, v), std::max(u, v));
      const double ratio = dg / dm;
      if (dg < dm) ++s.violations;
      s.min_ratio = std::min(s.min_ratio, ratio);
      s.max_ratio = std::max(s.max_ratio, ratio);
      ratio_sum += ratio;
      ++s.pairs;
    }
  }
  if (s.pairs > 0) s.mean_ratio = ratio_sum / static_cast<double>(s.pairs);
  return s;
}

}  // namespace orc
