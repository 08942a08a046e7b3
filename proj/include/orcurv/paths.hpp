#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "orcurv/graph.hpp"

namespace orc {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct BallMember {
  NodeId node = 0;
  double distance = 0.0;
};

/// Graph ball {z : d_G(center, z) <= radius}, members sorted by node id.
struct Ball {
  NodeId center = 0;
  double radius = 0.0;
  std::vector<BallMember> members;

  std::size_t size() const { return members.size(); }
  bool contains(NodeId v) const;
};

/// Relative slack applied to the ball radius so that sums like 3 * 0.1 still
/// count as <= 0.3.
inline constexpr double kBallSlack = 1e-12;

/// Exact graph ball by truncated Dijkstra.
Ball ball(const GeoGraph& graph, NodeId center, double radius);

/// |rows| x |cols| matrix of graph distances, row-major.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::vector<NodeId> row_nodes, std::vector<NodeId> col_nodes);

  std::size_t rows() const { return row_nodes_.size(); }
  std::size_t cols() const { return col_nodes_.size(); }
  double& at(std::size_t i, std::size_t j) { return data_[i * cols() + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * cols() + j]; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols(), cols()}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols(), cols()}; }
  std::span<const double> data() const { return data_; }
  std::span<const NodeId> row_nodes() const { return row_nodes_; }
  std::span<const NodeId> col_nodes() const { return col_nodes_; }

 private:
  std::vector<NodeId> row_nodes_;
  std::vector<NodeId> col_nodes_;
  std::vector<double> data_;
};

enum class SearchMethod { Dijkstra, AStar };

/// Instrumentation totals over all searches of one call.
struct SearchStats {
  std::uint64_t settled = 0;
  std::uint64_t pushes = 0;
};

struct MatrixOptions {
  SearchMethod method = SearchMethod::AStar;
  /// 0 = OpenMP default; 1 = calling thread only.
  int threads = 0;
};

/// Distances d_G(x_i, y_j) in the full graph for all x_i in `from`, y_j in `to`.
/// One multi-target search per row, rows in parallel. AStar uses the manifold
/// lower bound max(0, d_M(z, c) - r) / s, with c the centre of `to`, r the largest
/// manifold distance from c to a member, and s the cost of manifold length
/// (1, or epsilon for unit weights); it falls back to Dijkstra for graphs
/// without coordinates. Throws UnreachableError for the first missing pair.
DistanceMatrix distance_matrix(const GeoGraph& graph, const Ball& from, const Ball& to,
                               const MatrixOptions& options = {}, SearchStats* stats = nullptr);

/// Coordinate lower bounds d_M(x_i, y_j) / s <= d_G(x_i, y_j), laid out like
/// distance_matrix. Empty when the graph has no coordinates or no scale.
std::optional<DistanceMatrix> manifold_lower_bounds(const GeoGraph& graph, const Ball& from, const Ball& to);

using NodePair = std::pair<NodeId, NodeId>;

/// d_G for each listed pair (kInfinity when unreachable). Pairs sharing a
/// source share one multi-target search; sources run in parallel. AStar uses
/// the manifold distance to the nearest pending target as heuristic.
std::vector<double> pair_distances(const GeoGraph& graph, std::span<const NodePair> pairs,
                                   const MatrixOptions& options = {}, SearchStats* stats = nullptr);

/// Serial reference: a complete Dijkstra run from every row node.
DistanceMatrix distance_matrix_reference(const GeoGraph& graph, const Ball& from, const Ball& to);

/// Single-source distances to every node (kInfinity when unreachable).
std::vector<double> shortest_distances(const GeoGraph& graph, NodeId source);

/// Binary dump: "ORCDMAT1", u64 rows, u64 cols, rows*cols f64 row-major,
/// then the int32 row and column node ids. Little-endian host layout.
void write_distance_matrix(const DistanceMatrix& m, const std::filesystem::path& path);
DistanceMatrix read_distance_matrix(const std::filesystem::path& path);

struct StretchOptions {
  /// Only pairs with manifold distance in [min_manifold, max_manifold] are sampled.
  double min_manifold = 0.0;
  double max_manifold = kInfinity;
  /// Pairs drawn per source node before moving to the next source.
  std::size_t pairs_per_source = 100;
  std::uint64_t seed = 1;
};

struct StretchSummary {
  double min_ratio = kInfinity;
  double mean_ratio = 0.0;
  double max_ratio = 0.0;
  std::size_t pairs = 0;
  std::size_t skipped = 0;     ///< unreachable pairs
  std::size_t violations = 0;  ///< pairs with d_G < d_M
};

/// Distribution of d_G / d_M over randomly sampled node pairs. Requires a graph
/// with coordinates and ManifoldDistance or EpsilonConstant weights.
StretchSummary stretch_stats(const GeoGraph& graph, std::size_t pair_sample_size,
                             const StretchOptions& options = {});

}  // namespace orc
