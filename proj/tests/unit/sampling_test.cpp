#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "orcurv/errors.hpp"
#include "orcurv/sampling.hpp"

using namespace orc;
constexpr double pi = std::numbers::pi;

namespace {

// Unnormalised radial CDF by composite Simpson on r / (1 - r^2)^2.
double radial_mass(double rho) {
  const int steps = 2000;
  const double h = rho / steps;
  auto f = [](double r) { return r / ((1 - r * r) * (1 - r * r)); };
  double s = f(0) + f(rho);
  for (int i = 1; i < steps; ++i) s += (i % 2 ? 4 : 2) * f(i * h);
  return s * h / 3;
}

double icdf_by_bisection(double u, double R) {
  const double total = radial_mass(R);
  double lo = 0, hi = R;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2;
    (radial_mass(mid) / total < u ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

// Pearson statistic against equal expected counts.
double chi_square(const std::vector<int>& counts) {
  double total = 0;
  for (int c : counts) total += c;
  const double e = total / counts.size();
  double chi = 0;
  for (int c : counts) chi += (c - e) * (c - e) / e;
  return chi;
}

}  // namespace

TEST(Seeds, DeriveSeedSeparatesStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a)
    for (std::uint64_t b = 0; b < 20; ++b) seen.insert(derive_seed(1, {a, b}));
  EXPECT_EQ(seen.size(), 400u);
  EXPECT_EQ(derive_seed(5, {1, 2}), derive_seed(5, {1, 2}));
  EXPECT_NE(derive_seed(5, {1, 2}), derive_seed(5, {2, 1}));
}

TEST(Uniform01, HalfOpenUnitInterval) {
  Rng rng(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(SamplePoints, TorusFixedCountIsUniform) {
  const auto pts = sample_points(Surface::torus(), {1000, CountMode::FixedCount, 4});
  ASSERT_EQ(pts.size(), 1000u);
  double mean = 0;
  for (const auto& p : pts) mean += p.c1;
  EXPECT_NEAR(mean / 1000, 0.5, 0.05);
}

TEST(SamplePoints, TorusCellsPassChiSquare) {
  const auto pts = sample_points(Surface::torus(), {40000, CountMode::FixedCount, 5});
  std::vector<int> counts(100, 0);
  for (const auto& p : pts) ++counts[int(p.c1 * 10) * 10 + int(p.c2 * 10)];
  // 99.9% quantile of chi-square with 99 degrees of freedom.
  EXPECT_LT(chi_square(counts), 148.2);
}

TEST(SamplePoints, SphereBandsOfEqualAreaPassChiSquare) {
  const auto pts = sample_points(Surface::sphere(), {40000, CountMode::FixedCount, 6});
  // Equal-area bands in cos(theta), equal sectors in phi.
  std::vector<int> counts(100, 0);
  for (const auto& p : pts) {
    const int band = std::min(9, int((1 - std::cos(p.c1)) / 2 * 10));
    const int sector = std::min(9, int(p.c2 / (2 * pi) * 10));
    ++counts[band * 10 + sector];
  }
  EXPECT_LT(chi_square(counts), 148.2);
}

TEST(SamplePoints, SpherePoissonCountConcentrates) {
  const double n = 5000;
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto pts = sample_points(Surface::sphere(), {n / (4 * pi), CountMode::PoissonCount, seed});
    if (std::abs(double(pts.size()) - n) <= 3 * std::sqrt(n)) ++inside;
  }
  EXPECT_GE(inside, 99);
}

TEST(SamplePoints, BolzaRadialLawMatchesHyperbolicArea) {
  const auto pts = sample_points(Surface::bolza(), {40000, CountMode::FixedCount, 7});
  // A Poincare disc of Euclidean radius 0.3 lies inside the octagon; its
  // hyperbolic area over the surface area is the expected hit fraction.
  const double r = 0.3;
  const double d = 2 * std::atanh(r);
  const double p = 2 * pi * (std::cosh(d) - 1) / (4 * pi);
  int hits = 0;
  for (const auto& q : pts) {
    ASSERT_TRUE(bolza::in_octagon(as_complex(q)));
    if (std::abs(as_complex(q)) < r) ++hits;
  }
  const double sd = std::sqrt(pts.size() * p * (1 - p));
  EXPECT_NEAR(hits, pts.size() * p, 4 * sd);
}

TEST(SamplePoints, BolzaAngularSymmetry) {
  const auto pts = sample_points(Surface::bolza(), {40000, CountMode::FixedCount, 8});
  std::vector<int> counts(16, 0);
  for (const auto& q : pts) {
    double a = std::arg(as_complex(q));
    if (a < 0) a += 2 * pi;
    ++counts[std::min(15, int(a / (2 * pi) * 16))];
  }
  // 99.9% quantile, 15 degrees of freedom.
  EXPECT_LT(chi_square(counts), 37.7);
}

TEST(SamplePoints, SameSeedSamePoints) {
  for (auto s : {Surface::torus(), Surface::sphere(), Surface::bolza()}) {
    const auto a = sample_points(s, {500, CountMode::FixedCount, 42});
    const auto b = sample_points(s, {500, CountMode::FixedCount, 42});
    const auto c = sample_points(s, {500, CountMode::FixedCount, 43});
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    for (const auto& p : a) EXPECT_NO_THROW(validate_point(s, p));
  }
}

TEST(SamplePoints, FixedCountRoundsUp) {
  EXPECT_EQ(sample_points(Surface::torus(), {10.2, CountMode::FixedCount, 1}).size(), 11u);
}

TEST(RadialIcdf, Endpoints) {
  const double R = bolza::vertex_radius();
  EXPECT_EQ(hyperbolic_radius_icdf(0.0, R), 0.0);
  EXPECT_NEAR(hyperbolic_radius_icdf(1.0, R), R, 1e-15);
}

TEST(RadialIcdf, MatchesNumericInversion) {
  const double R = std::pow(2.0, -0.25);
  for (double u : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    EXPECT_NEAR(hyperbolic_radius_icdf(u, R), icdf_by_bisection(u, R), 1e-10) << "u=" << u;
  }
}

TEST(RadialIcdf, RejectsOutOfDomain) {
  EXPECT_THROW(hyperbolic_radius_icdf(-0.1, 0.5), DomainError);
  EXPECT_THROW(hyperbolic_radius_icdf(1.1, 0.5), DomainError);
  EXPECT_THROW(hyperbolic_radius_icdf(0.5, 1.0), DomainError);
}
