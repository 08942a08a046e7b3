#include "orcurv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "orcurv/errors.hpp"

namespace orc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBoundarySlack = 1e-12;

std::string fmt_point(SurfacePoint p) {
  return "(" + std::to_string(p.c1) + ", " + std::to_string(p.c2) + ")";
}

}  // namespace

double Surface::curvature() const {
  switch (kind) {
    case SurfaceKind::FlatTorus2D: return 0.0;
    case SurfaceKind::UnitSphere2D: return 1.0;
    case SurfaceKind::BolzaSurface: return -1.0;
  }
  return 0.0;
}

double Surface::volume() const {
  switch (kind) {
    case SurfaceKind::FlatTorus2D: return 1.0;
    case SurfaceKind::UnitSphere2D: return 4.0 * kPi;
    // Gauss-Bonnet for genus 2: -K * area = 2 pi (2g - 2).
    case SurfaceKind::BolzaSurface: return 4.0 * kPi;
  }
  return 0.0;
}

std::string_view surface_tag(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::FlatTorus2D: return "torus";
    case SurfaceKind::UnitSphere2D: return "sphere";
    case SurfaceKind::BolzaSurface: return "bolza";
  }
  return "unknown";
}

SurfaceKind parse_surface_kind(std::string_view tag) {
  if (tag == "torus" || tag == "FlatTorus2D") return SurfaceKind::FlatTorus2D;
  if (tag == "sphere" || tag == "UnitSphere2D") return SurfaceKind::UnitSphere2D;
  if (tag == "bolza" || tag == "BolzaSurface") return SurfaceKind::BolzaSurface;
  throw DomainError("unknown surface '" + std::string(tag) + "'");
}

void validate_point(const Surface& surface, SurfacePoint p) {
  if (!std::isfinite(p.c1) || !std::isfinite(p.c2)) {
    throw DomainError("non-finite coordinates " + fmt_point(p));
  }
  switch (surface.kind) {
    case SurfaceKind::FlatTorus2D:
      if (p.c1 < 0.0 || p.c1 >= 1.0 || p.c2 < 0.0 || p.c2 >= 1.0) {
        throw DomainError("torus point outside [0,1)^2: " + fmt_point(p));
      }
      return;
    case SurfaceKind::UnitSphere2D:
      if (p.c1 < 0.0 || p.c1 > kPi || p.c2 < 0.0 || p.c2 >= 2.0 * kPi) {
        throw DomainError("sphere point outside [0,pi]x[0,2pi): " + fmt_point(p));
      }
      return;
    case SurfaceKind::BolzaSurface: {
      const auto z = as_complex(p);
      if (std::abs(z) >= 1.0) throw DomainError("Bolza point outside unit disk: " + fmt_point(p));
      if (!bolza::in_octagon(z)) {
        throw DomainError("Bolza point outside fundamental octagon: " + fmt_point(p));
      }
      return;
    }
  }
}

double torus::distance(SurfacePoint p, SurfacePoint q) {
  double du = std::abs(p.c1 - q.c1);
  double dv = std::abs(p.c2 - q.c2);
  du = std::min(du, 1.0 - du);
  dv = std::min(dv, 1.0 - dv);
  return std::sqrt(du * du + dv * dv);
}

std::array<double, 3> sphere::embed(SurfacePoint p) {
  const double st = std::sin(p.c1);
  return {st * std::cos(p.c2), st * std::sin(p.c2), std::cos(p.c1)};
}

double sphere::angle(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double cx = a[1] * b[2] - a[2] * b[1];
  const double cy = a[2] * b[0] - a[0] * b[2];
  const double cz = a[0] * b[1] - a[1] * b[0];
  const double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
  const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  return std::atan2(cross, dot);
}

double sphere::distance(SurfacePoint p, SurfacePoint q) { return angle(embed(p), embed(q)); }

// ---------------------------------------------------------------------------
// Bolza surface

namespace bolza {

double vertex_radius() { return std::pow(2.0, -0.25); }

double klein_vertex_radius() {
  const double r = vertex_radius();
  return 2.0 * r / (1.0 + r * r);
}

double systole() { return 2.0 * std::acosh(1.0 + std::numbers::sqrt2); }

GroupTable::GroupTable() {
  a_ = 1.0 + std::numbers::sqrt2;
  b_ = std::sqrt(a_ * a_ - 1.0);
  for (std::size_t k = 0; k < 8; ++k) {
    const Complex phase = std::polar(1.0, static_cast<double>(k) * kPi / 4.0);
    generators_[k] = Mobius{Complex{a_, 0.0}, b_ * phase, b_ * std::conj(phase), Complex{a_, 0.0}};
  }
  elements_[0] = Mobius{};
  std::size_t idx = 1;
  for (std::size_t k = 0; k < 8; ++k) {
    Mobius product = generators_[k];
    elements_[idx++] = product;
    for (std::size_t l = 1; l <= 5; ++l) {
      product = product * generators_[(k + 3 * l) % 8];
      elements_[idx++] = product;
    }
  }
}

const GroupTable& GroupTable::instance() {
  static const GroupTable table;
  return table;
}

double hyperbolic_from_pseudo_sq(double s) { return 2.0 * std::atanh(std::sqrt(s)); }

double poincare_distance(Complex z1, Complex z2) {
  return hyperbolic_from_pseudo_sq(pseudo_distance_sq(z1, z2));
}

bool in_octagon(Complex z) {
  const double r = std::abs(z);
  if (r >= 1.0) return false;
  const double rk = 2.0 * r / (1.0 + r * r);
  double theta = std::arg(z);
  if (theta < 0.0) theta += 2.0 * kPi;

  // Sector k spans the side between vertices k and k+1; phi is the angle from vertex k.
  const double sector = std::floor(4.0 / kPi * (theta - kPi / 8.0));
  const int k = ((static_cast<int>(sector) % 8) + 8) % 8;
  double phi = std::fmod(theta - kPi / 8.0 * (1.0 + 2.0 * k), 2.0 * kPi);
  if (phi < 0.0) phi += 2.0 * kPi;
  phi = std::clamp(phi, 0.0, kPi / 4.0);

  const double rc = klein_vertex_radius() * std::cos(kPi / 8.0) / std::cos(kPi / 8.0 - phi);
  return rk <= rc + kBoundarySlack;
}

double distance(Complex z1, Complex z2) {
  double best = pseudo_distance_sq(z1, z2);
  for (const Mobius& g : GroupTable::instance().elements().subspan(1)) {
    best = std::min(best, pseudo_distance_sq(z1, g(z2)));
  }
  return hyperbolic_from_pseudo_sq(best);
}

double distance_pruned(Complex z1, Complex z2) {
  // The identity image is inside the octagon, so it is always a good start.
  double best_sq = pseudo_distance_sq(z1, z2);
  double best = hyperbolic_from_pseudo_sq(best_sq);
  const double from_origin = 2.0 * std::atanh(std::abs(z1));
  for (const Mobius& g : GroupTable::instance().elements().subspan(1)) {
    const Complex w = g(z2);
    const double lower = 2.0 * std::atanh(std::min(std::abs(w), 1.0 - 1e-16)) - from_origin;
    if (lower > best + 1e-9) continue;
    const double s = pseudo_distance_sq(z1, w);
    if (s < best_sq) {
      best_sq = s;
      best = hyperbolic_from_pseudo_sq(s);
    }
  }
  return hyperbolic_from_pseudo_sq(best_sq);
}

}  // namespace bolza

double distance(const Surface& surface, SurfacePoint p, SurfacePoint q) {
  validate_point(surface, p);
  validate_point(surface, q);
  switch (surface.kind) {
    case SurfaceKind::FlatTorus2D: return torus::distance(p, q);
    case SurfaceKind::UnitSphere2D: return sphere::distance(p, q);
    case SurfaceKind::BolzaSurface: return bolza::distance(as_complex(p), as_complex(q));
  }
  return 0.0;
}

double injectivity_scale(const Surface& surface) {
  switch (surface.kind) {
    case SurfaceKind::FlatTorus2D: return 0.5;
    case SurfaceKind::UnitSphere2D: return kPi;
    case SurfaceKind::BolzaSurface: return 0.5 * bolza::systole();
  }
  return 0.0;
}

ProbePair probe_pair(const Surface& surface, double delta) {
  if (!(delta > 0.0) || !(delta < injectivity_scale(surface))) {
    throw RangeError("probe separation " + std::to_string(delta) + " outside (0, " +
                     std::to_string(injectivity_scale(surface)) + ") for " +
                     std::string(surface_tag(surface.kind)));
  }
  switch (surface.kind) {
    case SurfaceKind::FlatTorus2D: return {torus_point(0.5, 0.5), torus_point(0.5 + delta, 0.5)};
    case SurfaceKind::UnitSphere2D:
      return {sphere_point(kPi / 2.0, 0.0), sphere_point(kPi / 2.0, delta)};
    case SurfaceKind::BolzaSurface:
      return {bolza_point({0.0, 0.0}), bolza_point({std::tanh(delta / 2.0), 0.0})};
  }
  return {};
}

// ---------------------------------------------------------------------------

PreparedPoints::PreparedPoints(const Surface& surface, std::span<const SurfacePoint> points)
    : surface_(surface), points_(points.begin(), points.end()) {
  switch (surface.kind) {
    case SurfaceKind::FlatTorus2D: break;
    case SurfaceKind::UnitSphere2D:
      unit_.reserve(points_.size());
      for (const auto& p : points_) unit_.push_back(sphere::embed(p));
      break;
    case SurfaceKind::BolzaSurface: {
      const auto elements = bolza::GroupTable::instance().elements();
      images_.resize(points_.size() * bolza::kGroupSize);
      for (std::size_t i = 0; i < points_.size(); ++i) {
        const auto z = as_complex(points_[i]);
        images_[i * bolza::kGroupSize] = z;
        for (std::size_t g = 1; g < bolza::kGroupSize; ++g) {
          images_[i * bolza::kGroupSize + g] = elements[g](z);
        }
      }
      break;
    }
  }
}

double PreparedPoints::distance(std::size_t i, std::size_t j) const {
  switch (surface_.kind) {
    case SurfaceKind::FlatTorus2D: return torus::distance(points_[i], points_[j]);
    case SurfaceKind::UnitSphere2D: return sphere::angle(unit_[i], unit_[j]);
    case SurfaceKind::BolzaSurface: {
      const auto zi = as_complex(points_[i]);
      const bolza::Complex* img = &images_[j * bolza::kGroupSize];
      double best = bolza::pseudo_distance_sq(zi, img[0]);
      for (std::size_t g = 1; g < bolza::kGroupSize; ++g) {
        best = std::min(best, bolza::pseudo_distance_sq(zi, img[g]));
      }
      return bolza::hyperbolic_from_pseudo_sq(best);
    }
  }
  return 0.0;
}

}  // namespace orc
