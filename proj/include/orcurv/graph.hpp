#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "orcurv/geometry.hpp"

namespace orc {

using NodeId = std::int32_t;

enum class WeightScheme { ManifoldDistance, EpsilonConstant, Unit };

/// File / CLI tag: distance, epsilon, unit.
std::string_view scheme_tag(WeightScheme scheme);
WeightScheme parse_weight_scheme(std::string_view tag);

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double weight = 1.0;
};

/// Provenance carried by a graph and written into edge-list headers.
struct GraphMeta {
  std::optional<Surface> surface;
  std::size_t sampled = 0;  ///< sprinkled points; probes (if any) follow at sampled, sampled+1
  double epsilon = 0.0;
  WeightScheme scheme = WeightScheme::Unit;
  std::uint64_t seed = 0;
};

/// Immutable undirected weighted graph in compressed sparse row form, with
/// optional node coordinates on a surface.
class GeoGraph {
 public:
  GeoGraph() = default;

  /// Builds from an undirected edge list (each edge listed once, any order).
  /// Throws std::invalid_argument on self-loops, duplicates or out-of-range ids.
  static GeoGraph from_edges(std::size_t node_count, std::span<const Edge> edges, GraphMeta meta,
                             std::vector<SurfacePoint> nodes = {});

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return targets_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::span<const double> weights(NodeId v) const {
    return {weights_.data() + offsets_[v], weights_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  bool has_edge(NodeId u, NodeId v) const;
  /// Throws MissingEdgeError if absent.
  double edge_weight(NodeId u, NodeId v) const;

  /// Every edge once, u < v, sorted lexicographically.
  std::vector<Edge> edges() const;

  const GraphMeta& meta() const { return meta_; }
  bool has_coordinates() const { return !nodes_.empty(); }
  std::span<const SurfacePoint> nodes() const { return nodes_; }

  /// Probe indices when the graph came from build_rgg.
  NodeId probe_x() const { return static_cast<NodeId>(meta_.sampled); }
  NodeId probe_y() const { return static_cast<NodeId>(meta_.sampled + 1); }

  friend bool operator==(const GeoGraph& a, const GeoGraph& b);

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  std::vector<double> weights_;
  std::vector<SurfacePoint> nodes_;
  GraphMeta meta_;
};

enum class NeighborSearch { BruteForce, CellGrid };

struct BuildOptions {
  NeighborSearch search = NeighborSearch::CellGrid;
  /// 0 = OpenMP default; 1 = run on the calling thread only.
  int threads = 0;
};

/// Threshold graph on `nodes`: (i, j) is an edge iff d_M(i, j) <= epsilon (+1e-12).
GeoGraph build_threshold_graph(const Surface& surface, std::vector<SurfacePoint> nodes,
                               double epsilon, WeightScheme scheme, const BuildOptions& options = {});

/// Serial all-pairs reference for build_threshold_graph.
GeoGraph build_threshold_graph_reference(const Surface& surface, std::vector<SurfacePoint> nodes,
                                         double epsilon, WeightScheme scheme);

/// Random geometric graph on `points` plus the probe pair, wired by the same rule.
/// x gets index points.size(), y gets points.size() + 1.
GeoGraph build_rgg(const Surface& surface, std::span<const SurfacePoint> points,
                   const ProbePair& probe, double epsilon, WeightScheme scheme,
                   const BuildOptions& options = {}, std::uint64_t seed = 0);

/// epsilon_n = c_eps n^-alpha, delta_n = c_delta n^-beta.
struct ScalingSchedule {
  double alpha = 0.16;
  double beta = 0.16;
  double c_eps = 1.0;
  double c_delta = 1.0;
  std::size_t n = 0;

  double epsilon() const;
  double delta() const;
  /// Throws DomainError unless alpha, beta, c_eps, c_delta > 0 and epsilon <= delta.
  void validate() const;
};

enum class DensityClass { Dense, Sparse, Ultrasparse };
std::string_view density_tag(DensityClass c);

struct RegimeReport {
  bool weighted_ok = false;               ///< 0 < beta <= alpha, alpha + 2 beta < 1/D
  bool weighted_equal_radii_ok = false;   ///< alpha == beta < 1/(3D)
  bool unweighted_ok = false;             ///< 0 < beta < 1/9, 3 beta < alpha < (1 - 3 beta)/2
  bool scheme_ok = false;                 ///< the condition that applies to the scheme
  DensityClass density_class = DensityClass::Sparse;
  double degree_exponent = 0.0;           ///< mean degree ~ n^(1 - alpha D)
};

RegimeReport check_regime(double alpha, double beta, WeightScheme scheme);
inline RegimeReport check_regime(const ScalingSchedule& s, WeightScheme scheme) {
  return check_regime(s.alpha, s.beta, scheme);
}

/// n * vol(B(epsilon)) / vol(M). Throws RangeError when epsilon is not a valid
/// ball radius on the surface (sphere allows up to pi).
double expected_degree(const Surface& surface, double n, double epsilon);

/// Volume of a metric ball of radius r on the surface (r below injectivity scale).
double ball_volume(const Surface& surface, double r);

/// Edge-list file:
///   # surface=<tag> n=<int> epsilon=<float> scheme=<tag> seed=<int>
///   u v w            (one per edge)
///   # nodes
///   i c1 c2          (one per node)
/// Floats use 17 significant digits.
void write_edge_list(const GeoGraph& graph, const std::filesystem::path& path);
void write_edge_list(const GeoGraph& graph, std::ostream& out);

/// Reads the format above. The header and node block are optional, so plain
/// "u v [w]" files load as coordinate-free graphs. Throws ParseError naming the line.
GeoGraph read_edge_list(const std::filesystem::path& path);
GeoGraph read_edge_list(std::istream& in);

}  // namespace orc
