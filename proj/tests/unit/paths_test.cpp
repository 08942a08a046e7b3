#include <gtest/gtest.h>

#include <filesystem>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "orcurv/errors.hpp"
#include "orcurv/paths.hpp"
#include "orcurv/sampling.hpp"

using namespace orc;

namespace {

GeoGraph torus_rgg(std::size_t n, double eps, WeightScheme scheme, std::uint64_t seed) {
  const auto s = Surface::torus();
  const auto p = sample_points(s, {double(n), CountMode::FixedCount, seed});
  return build_rgg(s, p, probe_pair(s, 0.2), eps, scheme, {}, seed);
}

}  // namespace

TEST(Ball, ZeroRadiusIsTheCentre) {
  const auto g = oracle::path_graph(5);
  const auto b = ball(g, 2, 0.0);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b.members[0].node, 2);
  EXPECT_EQ(b.members[0].distance, 0.0);
}

TEST(Ball, HandTracedPath) {
  const std::vector<Edge> e{{0, 1, 0.4}, {1, 2, 0.4}};
  const auto g = oracle::make_graph(3, e);
  const auto b = ball(g, 0, 0.5);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b.members[0].node, 0);
  EXPECT_EQ(b.members[1].node, 1);
  EXPECT_EQ(b.members[1].distance, 0.4);
  EXPECT_FALSE(b.contains(2));
}

TEST(Ball, EpsilonWeightsReduceToHopCounts) {
  const double eps = 0.05;
  const auto g = torus_rgg(800, eps, WeightScheme::EpsilonConstant, 31);
  const auto edges = g.edges();
  for (int hops : {1, 2, 3, 5}) {
    const auto b = ball(g, g.probe_x(), hops * eps);
    const auto bfs = oracle::bfs_hops(g.node_count(), edges, g.probe_x());
    std::size_t expected = 0;
    for (std::size_t v = 0; v < bfs.size(); ++v) {
      const bool in = bfs[v] >= 0 && bfs[v] <= hops;
      expected += in;
      EXPECT_EQ(b.contains(NodeId(v)), in) << "node " << v << " hops " << hops;
    }
    EXPECT_EQ(b.size(), expected);
  }
}

TEST(Ball, GrowsWithRadius) {
  const auto g = torus_rgg(1500, 0.06, WeightScheme::ManifoldDistance, 32);
  std::size_t prev = 0;
  for (double r = 0.0; r <= 0.3; r += 0.03) {
    const auto b = ball(g, g.probe_x(), r);
    EXPECT_GE(b.size(), prev);
    for (const auto& m : b.members) EXPECT_LE(m.distance, r * (1 + 1e-12));
    prev = b.size();
  }
}

TEST(DistanceMatrix, SameBallIsSymmetricWithZeroDiagonal) {
  const auto g = torus_rgg(1000, 0.07, WeightScheme::ManifoldDistance, 33);
  const auto b = ball(g, g.probe_x(), 0.15);
  const auto m = distance_matrix(g, b, b);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    EXPECT_EQ(m.at(i, i), 0.0);
    for (std::size_t j = 0; j < m.cols(); ++j) EXPECT_NEAR(m.at(i, j), m.at(j, i), 1e-12);
  }
}

TEST(DistanceMatrix, PathThroughOutsideNode) {
  const std::vector<Edge> e{{0, 2, 0.3}, {2, 1, 0.3}};
  const auto g = oracle::make_graph(3, e);
  const auto m = distance_matrix(g, ball(g, 0, 0.0), ball(g, 1, 0.0));
  ASSERT_EQ(m.rows(), 1u);
  EXPECT_NEAR(m.at(0, 0), 0.6, 1e-15);
}

TEST(DistanceMatrix, UnreachableThrows) {
  const std::vector<Edge> e{{0, 1, 1.0}};
  const auto g = oracle::make_graph(3, e);
  EXPECT_THROW(distance_matrix(g, ball(g, 0, 1.0), ball(g, 2, 0.0)), UnreachableError);
  EXPECT_THROW(distance_matrix_reference(g, ball(g, 0, 1.0), ball(g, 2, 0.0)), UnreachableError);
}

TEST(Dijkstra, MatchesFloydWarshall) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t n = 20 + rng() % 100;
    const auto edges = oracle::random_edges(n, 0.06, rng, 0.1, 2.0);
    const auto fw = oracle::floyd_warshall(n, edges);
    const auto g = oracle::make_graph(n, edges);
    for (NodeId s = 0; s < NodeId(n); s += 7) {
      const auto d = shortest_distances(g, s);
      for (std::size_t t = 0; t < n; ++t) {
        if (std::isinf(fw[s][t])) {
          EXPECT_TRUE(std::isinf(d[t]));
        } else {
          EXPECT_NEAR(d[t], fw[s][t], 1e-12);
        }
      }
    }
  }
}

TEST(AStar, MatchesDijkstraAndSettlesFewerNodes) {
  std::uint64_t seed = 35;
  for (auto scheme : {WeightScheme::ManifoldDistance, WeightScheme::EpsilonConstant, WeightScheme::Unit}) {
    for (auto s : {Surface::torus(), Surface::sphere(), Surface::bolza()}) {
      const auto p = sample_points(s, {3000, CountMode::FixedCount, ++seed});
      // Mean degree about 30 keeps the probes in one component.
      const double eps = std::sqrt(30 * s.volume() / (std::numbers::pi * 3000));
      const auto g = build_rgg(s, p, probe_pair(s, 3 * eps), eps, scheme, {}, seed);
      const double r = scheme == WeightScheme::Unit ? 3.0 : 2.5 * eps;
      const Ball bx = ball(g, g.probe_x(), r), by = ball(g, g.probe_y(), r);
      SearchStats sa, sd;
      const auto ma = distance_matrix(g, bx, by, {SearchMethod::AStar, 1}, &sa);
      const auto md = distance_matrix(g, bx, by, {SearchMethod::Dijkstra, 1}, &sd);
      const auto ref = distance_matrix_reference(g, bx, by);
      for (std::size_t i = 0; i < ref.rows(); ++i)
        for (std::size_t j = 0; j < ref.cols(); ++j) {
          EXPECT_NEAR(ma.at(i, j), ref.at(i, j), 1e-12);
          EXPECT_NEAR(md.at(i, j), ref.at(i, j), 1e-12);
        }
      EXPECT_LE(sa.settled, sd.settled) << surface_tag(s.kind) << ' ' << scheme_tag(scheme);
    }
  }
}

TEST(PairDistances, MatchDijkstraOnEverySurfaceAndScheme) {
  std::uint64_t seed = 70;
  for (auto scheme : {WeightScheme::ManifoldDistance, WeightScheme::EpsilonConstant, WeightScheme::Unit}) {
    for (auto s : {Surface::torus(), Surface::sphere(), Surface::bolza()}) {
      const auto p = sample_points(s, {1500, CountMode::FixedCount, ++seed});
      const double eps = std::sqrt(25 * s.volume() / (std::numbers::pi * 1500));
      const auto g = build_rgg(s, p, probe_pair(s, 3 * eps), eps, scheme, {}, seed);
      std::mt19937_64 rng(seed);
      std::vector<NodePair> pairs;
      std::vector<std::vector<double>> rows;
      for (int src = 0; src < 12; ++src) {
        const NodeId u = NodeId(rng() % g.node_count());
        // Several targets per source, with direct neighbours among them.
        for (int t = 0; t < 6; ++t) pairs.emplace_back(u, NodeId(rng() % g.node_count()));
        for (NodeId v : g.neighbors(u).first(std::min<std::size_t>(3, g.degree(u)))) pairs.emplace_back(u, v);
        pairs.emplace_back(u, u);
      }
      for (auto method : {SearchMethod::AStar, SearchMethod::Dijkstra}) {
        const auto d = pair_distances(g, pairs, {method, 1});
        for (std::size_t a = 0; a < pairs.size(); ++a) {
          const auto ref = shortest_distances(g, pairs[a].first)[pairs[a].second];
          if (std::isinf(ref)) {
            EXPECT_TRUE(std::isinf(d[a]));
          } else {
            EXPECT_NEAR(d[a], ref, 1e-12 * std::max(1.0, ref)) << surface_tag(s.kind) << ' ' << scheme_tag(scheme);
          }
        }
      }
    }
  }
}

TEST(PairDistances, UnreachableIsInfinite) {
  const std::vector<Edge> e{{0, 1, 1.0}, {2, 3, 1.0}};
  const auto g = oracle::make_graph(4, e);
  const std::vector<NodePair> pairs{{0, 1}, {0, 2}, {3, 2}};
  const auto d = pair_distances(g, pairs);
  EXPECT_EQ(d[0], 1.0);
  EXPECT_TRUE(std::isinf(d[1]));
  EXPECT_EQ(d[2], 1.0);
}

TEST(ManifoldLowerBounds, NeverExceedGraphDistance) {
  for (auto scheme : {WeightScheme::ManifoldDistance, WeightScheme::EpsilonConstant, WeightScheme::Unit}) {
    const auto g = torus_rgg(2000, 0.06, scheme, 43);
    const double r = scheme == WeightScheme::Unit ? 3.0 : 0.15;
    const Ball bx = ball(g, g.probe_x(), r), by = ball(g, g.probe_y(), r);
    const auto lb = manifold_lower_bounds(g, bx, by);
    ASSERT_TRUE(lb.has_value());
    const auto ref = distance_matrix_reference(g, bx, by);
    ASSERT_EQ(lb->rows(), ref.rows());
    for (std::size_t a = 0; a < ref.data().size(); ++a) EXPECT_LE(lb->data()[a], ref.data()[a]);
  }
  EXPECT_FALSE(manifold_lower_bounds(oracle::path_graph(3), ball(oracle::path_graph(3), 0, 1.0),
                                     ball(oracle::path_graph(3), 2, 1.0)));
}

TEST(DistanceMatrix, ThreadedEqualsSerial) {
  const auto g = torus_rgg(4000, 0.05, WeightScheme::ManifoldDistance, 40);
  const Ball bx = ball(g, g.probe_x(), 0.15), by = ball(g, g.probe_y(), 0.15);
  const auto one = distance_matrix(g, bx, by, {SearchMethod::AStar, 1});
  const auto four = distance_matrix(g, bx, by, {SearchMethod::AStar, 4});
  ASSERT_EQ(one.rows(), four.rows());
  for (std::size_t i = 0; i < one.data().size(); ++i) EXPECT_EQ(one.data()[i], four.data()[i]);
}

TEST(DistanceMatrix, BinaryRoundTrip) {
  const auto g = torus_rgg(500, 0.1, WeightScheme::ManifoldDistance, 41);
  const auto m = distance_matrix(g, ball(g, g.probe_x(), 0.2), ball(g, g.probe_y(), 0.2));
  const auto path = std::filesystem::temp_directory_path() / "orcurv_dmat_test.bin";
  write_distance_matrix(m, path);
  const auto back = read_distance_matrix(path);
  std::filesystem::remove(path);
  ASSERT_EQ(back.rows(), m.rows());
  ASSERT_EQ(back.cols(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) EXPECT_EQ(back.row_nodes()[i], m.row_nodes()[i]);
  for (std::size_t i = 0; i < m.data().size(); ++i) EXPECT_EQ(back.data()[i], m.data()[i]);
}

TEST(Stretch, AdjacentPairHasRatioOne) {
  const std::vector<SurfacePoint> p{{0.3, 0.3}, {0.33, 0.34}};
  const auto g = build_threshold_graph(Surface::torus(), p, 0.1, WeightScheme::ManifoldDistance);
  const auto st = stretch_stats(g, 10);
  ASSERT_GT(st.pairs, 0u);
  EXPECT_EQ(st.min_ratio, 1.0);
  EXPECT_EQ(st.max_ratio, 1.0);
}

TEST(Stretch, EpsilonHopAtHalfEpsilonIsTwo) {
  const std::vector<SurfacePoint> p{{0.3, 0.3}, {0.35, 0.3}};
  const auto g = build_threshold_graph(Surface::torus(), p, 0.1, WeightScheme::EpsilonConstant);
  const auto st = stretch_stats(g, 10);
  ASSERT_GT(st.pairs, 0u);
  EXPECT_NEAR(st.max_ratio, 2.0, 1e-12);
}

TEST(Stretch, DenseTorusIsNearlyGeodesic) {
  const double eps = 0.05;
  // Mean degree n pi eps^2 = 20000 * 0.00785 ~ 157.
  const auto g = torus_rgg(20000, eps, WeightScheme::ManifoldDistance, 42);
  StretchOptions opt;
  opt.min_manifold = 5 * eps;
  opt.max_manifold = 20 * eps;
  opt.pairs_per_source = 10;
  const auto st = stretch_stats(g, 2000, opt);
  EXPECT_GE(st.pairs, 1000u);
  EXPECT_EQ(st.violations, 0u);
  EXPECT_GE(st.min_ratio, 1.0);
  EXPECT_LE(st.max_ratio, 1.3);
}
