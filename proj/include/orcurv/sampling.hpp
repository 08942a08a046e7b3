#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "orcurv/geometry.hpp"

namespace orc {

/// Generator used for every random stream in the library.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic child seed from a parent seed and a list of stream labels.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> labels);

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

enum class CountMode { PoissonCount, FixedCount };

struct SamplerConfig {
  /// FixedCount: number of points (rounded up). PoissonCount: points per unit volume.
  double rate = 0.0;
  CountMode mode = CountMode::FixedCount;
  std::uint64_t seed = 0;
};

/// I.i.d. points, uniform with respect to the surface's volume form.
std::vector<SurfacePoint> sample_points(const Surface& surface, const SamplerConfig& config);

/// Inverse CDF of the radial law with density proportional to r / (1 - r^2)^2
/// on the Poincare disk of radius R.
double hyperbolic_radius_icdf(double u, double R);

/// One uniform point in the fundamental octagon (Poincare coordinates).
SurfacePoint sample_bolza_point(Rng& rng);

}  // namespace orc
