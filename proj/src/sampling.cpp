#include "orcurv/sampling.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "orcurv/errors.hpp"

namespace orc {

namespace {

constexpr int kMaxConsecutiveRejections = 1'000'000;

SurfacePoint sample_torus_point(Rng& rng) {
  const double u = uniform01(rng);
  const double v = uniform01(rng);
  return torus_point(u, v);
}

SurfacePoint sample_sphere_point(Rng& rng) {
  const double cos_theta = 1.0 - 2.0 * uniform01(rng);
  const double phi = 2.0 * std::numbers::pi * uniform01(rng);
  return sphere_point(std::acos(cos_theta), phi);
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> labels) {
  std::uint64_t h = mix64(base);
  for (std::uint64_t label : labels) h = mix64(h ^ mix64(label + 0x632be59bd9b4e019ULL));
  return h;
}

double hyperbolic_radius_icdf(double u, double R) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("icdf variate outside [0,1]: " + std::to_string(u));
  if (!(R > 0.0 && R < 1.0)) throw DomainError("disk radius outside (0,1): " + std::to_string(R));
  if (u == 1.0) return R;
  const double t = u * R * R / (1.0 - R * R);
  return std::sqrt(t / (1.0 + t));
}

SurfacePoint sample_bolza_point(Rng& rng) {
  const double R = bolza::vertex_radius();
  for (int attempt = 0; attempt < kMaxConsecutiveRejections; ++attempt) {
    const double r = hyperbolic_radius_icdf(uniform01(rng), R);
    const double theta = 2.0 * std::numbers::pi * uniform01(rng);
    const auto z = std::polar(r, theta);
    if (bolza::in_octagon(z)) return bolza_point(z);
  }
  throw InternalError("Bolza rejection sampler exceeded retry bound");
}

std::vector<SurfacePoint> sample_points(const Surface& surface, const SamplerConfig& config) {
  if (!(config.rate > 0.0) || !std::isfinite(config.rate)) {
    throw DomainError("sampling rate must be positive and finite");
  }
  Rng rng(config.seed);
  std::size_t count = 0;
  if (config.mode == CountMode::FixedCount) {
    count = static_cast<std::size_t>(std::ceil(config.rate));
  } else {
    std::poisson_distribution<std::uint64_t> poisson(config.rate * surface.volume());
    count = poisson(rng);
  }

  std::vector<SurfacePoint> points;
  points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    switch (surface.kind) {
      case SurfaceKind::FlatTorus2D: points.push_back(sample_torus_point(rng)); break;
      case SurfaceKind::UnitSphere2D: points.push_back(sample_sphere_point(rng)); break;
      case SurfaceKind::BolzaSurface: points.push_back(sample_bolza_point(rng)); break;
    }
  }
  return points;
}

}  // namespace orc
