#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "orcurv/errors.hpp"
#include "orcurv/transport.hpp"

using namespace orc;

namespace {

TransportProblem uniform_problem(const std::vector<std::vector<double>>& cost) {
  TransportProblem p;
  p.rows = cost.size();
  p.cols = cost[0].size();
  for (const auto& r : cost) p.cost.insert(p.cost.end(), r.begin(), r.end());
  p.source_mass.assign(p.rows, 1.0 / p.rows);
  p.sink_mass.assign(p.cols, 1.0 / p.cols);
  return p;
}

// Vertices of the 2x3 transportation polytope. With x11, x12 free, every plan
// entry is affine in (x11, x12); vertices are feasible intersections of two
// of the six lines {x_ij = 0}.
double two_by_three_by_vertices(const std::array<std::array<double, 3>, 2>& c, std::array<double, 2> a,
                                std::array<double, 3> b) {
  // x_ij = k0 + k1 x11 + k2 x12 for each cell, row-major.
  const double coef[6][3] = {
      {0, 1, 0}, {0, 0, 1}, {a[0], -1, -1}, {b[0], -1, 0}, {b[1], 0, -1}, {b[2] - a[0], 1, 1},
  };
  double best = oracle::kInf;
  for (int p = 0; p < 6; ++p)
    for (int q = p + 1; q < 6; ++q) {
      const double det = coef[p][1] * coef[q][2] - coef[p][2] * coef[q][1];
      if (std::abs(det) < 1e-14) continue;
      const double x = (-coef[p][0] * coef[q][2] + coef[p][2] * coef[q][0]) / det;
      const double y = (coef[q][1] * coef[p][0] - coef[p][1] * coef[q][0]) / det;
      bool ok = true;
      double value = 0;
      for (int k = 0; k < 6; ++k) {
        const double v = coef[k][0] + coef[k][1] * x + coef[k][2] * y;
        if (v < -1e-12) ok = false;
        value += v * c[k / 3][k % 3];
      }
      if (ok) best = std::min(best, value);
    }
  return best;
}

}  // namespace

TEST(SolveEmd, SingleAtom) {
  const auto s = solve_emd(uniform_problem({{0.7}}));
  ASSERT_EQ(s.status, TransportStatus::Optimal);
  EXPECT_EQ(s.value, 0.7);
}

TEST(SolveEmd, IdenticalSupportCostsNothing) {
  const auto s = solve_emd(uniform_problem({{0, 1, 2}, {1, 0, 1}, {2, 1, 0}}));
  EXPECT_EQ(s.value, 0.0);
}

TEST(SolveEmd, TwoByTwoAntiDiagonal) {
  const auto p = uniform_problem({{0, 1}, {1, 3}});
  const auto s = solve_emd(p);
  EXPECT_NEAR(s.value, 1.0, 1e-15);
  EXPECT_NEAR(s.plan_at(0, 1), 0.5, 1e-15);
  EXPECT_NEAR(s.plan_at(1, 0), 0.5, 1e-15);
  EXPECT_TRUE(check_certificate(p, s).holds(1e-12));
}

TEST(SolveEmd, MatchesPermutationBruteForce) {
  std::mt19937_64 rng(51);
  std::uniform_int_distribution<int> cost(0, 9);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t k = 1 + trial % 6;
    std::vector<std::vector<double>> c(k, std::vector<double>(k));
    for (auto& r : c)
      for (auto& x : r) x = cost(rng);
    const auto p = uniform_problem(c);
    const auto s = solve_emd(p);
    EXPECT_NEAR(s.value, oracle::min_permutation_cost(c), 1e-9);
    EXPECT_TRUE(check_certificate(p, s).holds(1e-9));
  }
}

TEST(UniformTransportSolver, WarmRestartMatchesPermutationBruteForce) {
  std::mt19937_64 rng(57);
  std::uniform_int_distribution<int> cost(0, 9);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t k = 2 + trial % 5;
    std::vector<std::vector<double>> c(k, std::vector<double>(k));
    std::vector<double> flat;
    for (auto& r : c)
      for (auto& x : r) flat.push_back(x = cost(rng));
    UniformTransportSolver solver(flat, k, k, 30.0);
    EXPECT_NEAR(solver.solve().value, oracle::min_permutation_cost(c), 1e-9);
    // Raise a few costs and restart from the old basis.
    for (int round = 0; round < 3; ++round) {
      for (int t = 0; t < 3; ++t) {
        const std::size_t a = rng() % (k * k);
        c[a / k][a % k] += cost(rng);
        solver.set_cost(a, c[a / k][a % k]);
      }
      const auto warm = solver.solve();
      EXPECT_NEAR(warm.value, oracle::min_permutation_cost(c), 1e-9) << "trial " << trial;
      double mass = 0;
      for (double f : warm.flow) mass += f;
      EXPECT_NEAR(mass, double(k * k), 1e-9);
    }
  }
}

TEST(UniformTransportSolver, RejectsBadInput) {
  EXPECT_THROW(UniformTransportSolver({1.0, 2.0}, 2, 2), DomainError);
  UniformTransportSolver s({0.0, 1.0, 1.0, 0.0}, 2, 2);
  EXPECT_THROW(s.set_cost(0, -1.0), DomainError);
  EXPECT_EQ(s.solve().value, 0.0);
}

TEST(SolveEmd, TwoByThreeMatchesVertexEnumeration) {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<std::array<double, 3>, 2> c;
    for (auto& r : c)
      for (auto& x : r) x = u(rng);
    // Random masses; the last entry of each side balances the total to 1.
    const double a0 = 0.05 + 0.9 * u(rng);
    const double b0 = 0.05 + 0.45 * u(rng), b1 = 0.05 + 0.4 * u(rng);
    const std::array<double, 2> a{a0, 1 - a0};
    const std::array<double, 3> b{b0, b1, 1 - b0 - b1};
    TransportProblem p;
    p.rows = 2;
    p.cols = 3;
    for (auto& r : c) p.cost.insert(p.cost.end(), r.begin(), r.end());
    p.source_mass.assign(a.begin(), a.end());
    p.sink_mass.assign(b.begin(), b.end());
    const auto s = solve_emd(p);
    ASSERT_EQ(s.status, TransportStatus::Optimal);
    EXPECT_NEAR(s.value, two_by_three_by_vertices(c, a, b), 1e-12);
  }
}

TEST(SolveEmd, CertificateOnRectangularProblems) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    TransportProblem p;
    p.rows = 1 + rng() % 30;
    p.cols = 1 + rng() % 30;
    for (std::size_t i = 0; i < p.rows * p.cols; ++i) p.cost.push_back(trial % 2 ? double(rng() % 4) : u(rng));
    // Integer masses with equal totals keep the problem exactly balanced.
    const std::size_t total = p.rows * p.cols;
    p.source_mass.assign(p.rows, double(p.cols));
    p.sink_mass.assign(p.cols, double(p.rows));
    const auto s = solve_emd(p);
    ASSERT_EQ(s.status, TransportStatus::Optimal);
    const auto cert = check_certificate(p, s);
    EXPECT_TRUE(cert.holds(1e-9 * total)) << "gap " << cert.duality_gap << " slack " << cert.slackness;
  }
}

TEST(SolveEmd, ScaleEquivariant) {
  std::mt19937_64 rng(54);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> c(5, std::vector<double>(5));
  for (auto& r : c)
    for (auto& x : r) x = u(rng);
  auto p = uniform_problem(c);
  const double v = solve_emd(p).value;
  for (auto& x : p.cost) x *= 8.0;
  EXPECT_NEAR(solve_emd(p).value, 8.0 * v, 1e-12);
  for (auto& x : p.cost) x += 0.5;
  EXPECT_NEAR(solve_emd(p).value, 8.0 * v + 0.5, 1e-12);
}

TEST(SolveEmd, AllEqualCosts) {
  const auto s = solve_emd(uniform_problem(std::vector<std::vector<double>>(6, std::vector<double>(6, 2.5))));
  EXPECT_NEAR(s.value, 2.5, 1e-12);
}

TEST(SolveEmd, HighlyDegenerateUniformProblem) {
  // Many ties: hop-like costs in {0,1,2,3} on a 60 x 60 uniform problem.
  std::mt19937_64 rng(55);
  std::vector<std::vector<double>> c(60, std::vector<double>(60));
  for (auto& r : c)
    for (auto& x : r) x = double(rng() % 4);
  const auto p = uniform_problem(c);
  const auto s = solve_emd(p);
  EXPECT_TRUE(check_certificate(p, s).holds(1e-9));
}

TEST(SolveEmd, InfeasibleAndInvalid) {
  auto p = uniform_problem({{1, 2}, {3, 4}});
  p.sink_mass[0] += 0.1;
  EXPECT_EQ(solve_emd(p).status, TransportStatus::Infeasible);
  auto q = uniform_problem({{1, 2}, {3, 4}});
  q.cost[1] = -1;
  EXPECT_THROW(solve_emd(q), DomainError);
  auto r = uniform_problem({{1, 2}, {3, 4}});
  r.cost.pop_back();
  EXPECT_THROW(solve_emd(r), DomainError);
}

TEST(BallTransport, SameBallIsFree) {
  const auto g = oracle::complete_graph(4);
  const auto b = ball(g, 0, 1.0);
  EXPECT_EQ(wasserstein_between_balls(b, b, distance_matrix(g, b, b)), 0.0);
}

TEST(BallTransport, SingletonsCostTheirDistance) {
  const auto g = oracle::path_graph(4);
  const auto bx = ball(g, 0, 0.0), by = ball(g, 3, 0.0);
  EXPECT_EQ(wasserstein_between_balls(bx, by, distance_matrix(g, bx, by)), 3.0);
}

TEST(BallTransport, TwoByThreeFixture) {
  // Star-like fixture: x = 0 with ball {0, 1}; y = 4 with ball {2, 3, 4}.
  const std::vector<Edge> e{{0, 1, 0.5}, {1, 2, 0.7}, {2, 4, 0.4}, {3, 4, 0.3}, {0, 3, 1.3}};
  const auto g = oracle::make_graph(5, e);
  const auto bx = ball(g, 0, 0.5);
  const auto by = ball(g, 4, 0.4);
  ASSERT_EQ(bx.size(), 2u);
  ASSERT_EQ(by.size(), 3u);
  const auto dm = distance_matrix(g, bx, by);
  std::array<std::array<double, 3>, 2> c;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) c[i][j] = dm.at(i, j);
  const double expected = two_by_three_by_vertices(c, {0.5, 0.5}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  EXPECT_NEAR(wasserstein_between_balls(bx, by, dm), expected, 1e-12);
}
