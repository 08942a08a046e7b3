#pragma once

#include <cstddef>
#include <cstdint>

#include "orcurv/graph.hpp"
#include "orcurv/paths.hpp"

namespace orc {

/// One Ollivier curvature measurement on one graph.
struct CurvatureSample {
  double kappa = 0.0;           ///< 1 - W / delta
  double kappa_rescaled = 0.0;  ///< kappa / delta^2
  double delta = 0.0;
  double wasserstein = 0.0;
  std::size_t ball_x_size = 0;
  std::size_t ball_y_size = 0;
};

struct MesoscopicOptions {
  MatrixOptions matrix;
  /// Evaluate graph distances only where the transport plan needs them. Needs
  /// coordinates; graphs without them always get the full matrix.
  bool lazy_costs = true;
  /// Below this many ball pairs the full matrix is cheaper.
  std::size_t lazy_min_pairs = std::size_t{1} << 17;
};

/// Mesoscopic Ollivier curvature between x and y: uniform measures on the
/// graph balls B_G(x, delta), B_G(y, delta) (centres included), exact W over
/// full-graph distances. Throws ProbeError if y is unreachable from x.
CurvatureSample ollivier_mesoscopic(const GeoGraph& graph, NodeId x, NodeId y, double delta,
                                    const MesoscopicOptions& options = {});

/// Classic one-hop Ollivier curvature of an edge: uniform measures on the open
/// neighbourhoods N(x), N(y), hop-count costs, kappa = 1 - W. Edge weights are
/// ignored. Throws MissingEdgeError if x and y are not adjacent.
double ollivier_classic(const GeoGraph& graph, NodeId x, NodeId y);

enum class FormanOrder { F1, F2 };

/// F1 = 4 - (k_i + k_j); F2 = F1 + 3 * (triangles through the edge).
/// Throws MissingEdgeError if (i, j) is not an edge.
double forman(const GeoGraph& graph, NodeId i, NodeId j, FormanOrder order);

/// Number of common neighbours of i and j.
std::size_t triangles_on_edge(const GeoGraph& graph, NodeId i, NodeId j);

/// Limit of kappa / delta^2 on a constant-curvature surface: Ric(v,v) / (2 (D + 2)) = K / 8.
struct RicciTarget {
  double value = 0.0;
};

RicciTarget ricci_target(const Surface& surface);

}  // namespace orc
