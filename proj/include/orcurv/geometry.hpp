#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace orc {

enum class SurfaceKind { FlatTorus2D, UnitSphere2D, BolzaSurface };

/// One of the three closed constant-curvature surfaces.
///
/// Torus: unit square with opposite sides identified (curvature 0, area 1).
/// Sphere: unit sphere (curvature +1, area 4pi).
/// Bolza: genus-2 quotient of the hyperbolic plane (curvature -1, area 4pi).
struct Surface {
  SurfaceKind kind = SurfaceKind::FlatTorus2D;

  static Surface torus() { return {SurfaceKind::FlatTorus2D}; }
  static Surface sphere() { return {SurfaceKind::UnitSphere2D}; }
  static Surface bolza() { return {SurfaceKind::BolzaSurface}; }

  double curvature() const;
  int dimension() const { return 2; }
  double volume() const;

  friend bool operator==(const Surface&, const Surface&) = default;
};

/// Short tag used in files and on the command line: torus, sphere, bolza.
std::string_view surface_tag(SurfaceKind kind);
/// Accepts the short tags and the enum names. Throws DomainError otherwise.
SurfaceKind parse_surface_kind(std::string_view tag);

/// Chart coordinates of a point.
///   torus:  (u, v) in [0,1)^2
///   sphere: (theta, phi), theta in [0,pi], phi in [0,2pi)
///   bolza:  (Re z, Im z) of a Poincare-disk point inside the fundamental octagon
struct SurfacePoint {
  double c1 = 0.0;
  double c2 = 0.0;

  friend bool operator==(const SurfacePoint&, const SurfacePoint&) = default;
};

inline SurfacePoint torus_point(double u, double v) { return {u, v}; }
inline SurfacePoint sphere_point(double theta, double phi) { return {theta, phi}; }
inline SurfacePoint bolza_point(std::complex<double> z) { return {z.real(), z.imag()}; }
inline std::complex<double> as_complex(SurfacePoint p) { return {p.c1, p.c2}; }

/// Throws DomainError if `p` is outside the chart of `surface`.
void validate_point(const Surface& surface, SurfacePoint p);

/// Intrinsic geodesic distance. Validates both points.
double distance(const Surface& surface, SurfacePoint p, SurfacePoint q);

/// Largest radius below which metric balls are embedded discs: 1/2 on the torus,
/// pi on the sphere, half the systole on the Bolza surface.
double injectivity_scale(const Surface& surface);

struct ProbePair {
  SurfacePoint x;
  SurfacePoint y;
};

/// Canonical probe placement: x at the chart origin, y at distance `delta` along
/// the fixed direction. Throws RangeError unless 0 < delta < injectivity_scale.
ProbePair probe_pair(const Surface& surface, double delta);

namespace torus {
double distance(SurfacePoint p, SurfacePoint q);
}

namespace sphere {
std::array<double, 3> embed(SurfacePoint p);
/// atan2(|a x b|, a . b); well conditioned for both tiny and near-antipodal angles.
double angle(const std::array<double, 3>& a, const std::array<double, 3>& b);
double distance(SurfacePoint p, SurfacePoint q);
}  // namespace sphere

namespace bolza {

using Complex = std::complex<double>;

/// Linear fractional map z -> (a z + b) / (c z + d).
struct Mobius {
  Complex a{1.0, 0.0};
  Complex b{0.0, 0.0};
  Complex c{0.0, 0.0};
  Complex d{1.0, 0.0};

  Complex operator()(Complex z) const { return (a * z + b) / (c * z + d); }
  Complex determinant() const { return a * d - b * c; }
  friend Mobius operator*(const Mobius& l, const Mobius& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c,
            l.c * r.b + l.d * r.d};
  }
};

inline constexpr std::size_t kGroupSize = 49;

/// Octagon vertex radius in the Poincare disk, 2^(-1/4).
double vertex_radius();
/// Octagon vertex radius in the Klein disk, 2^(5/4)/(1+sqrt 2).
double klein_vertex_radius();
/// Length of the shortest closed geodesic, 2 arccosh(1+sqrt 2).
double systole();

/// The eight side-pairing generators and the 49 elements (identity first, then
/// the 48 neighbours g_k g_{k+3} ... g_{k+3l}, k = 0..7, l = 0..5) that map the
/// fundamental octagon onto itself and its side- and vertex-adjacent copies.
class GroupTable {
 public:
  static const GroupTable& instance();

  const Mobius& generator(std::size_t k) const { return generators_[k % 8]; }
  std::span<const Mobius> generators() const { return generators_; }
  std::span<const Mobius> elements() const { return elements_; }

  double a() const { return a_; }
  double b() const { return b_; }

 private:
  GroupTable();

  double a_;
  double b_;
  std::array<Mobius, 8> generators_;
  std::array<Mobius, kGroupSize> elements_;
};

/// |(z1 - z2) / (1 - conj(z1) z2)|^2, the squared pseudo-hyperbolic distance.
inline double pseudo_distance_sq(Complex z1, Complex z2) {
  const Complex num = z1 - z2;
  const Complex den = Complex{1.0, 0.0} - std::conj(z1) * z2;
  return std::norm(num) / std::norm(den);
}

/// Distance in the hyperbolic plane (Poincare disk): 2 artanh |(z1-z2)/(1-conj(z1) z2)|.
double poincare_distance(Complex z1, Complex z2);

/// Converts a squared pseudo-hyperbolic distance to a hyperbolic distance.
double hyperbolic_from_pseudo_sq(double s);

/// Klein-model membership test for the fundamental octagon. Points within 1e-12
/// of a side count as inside.
bool in_octagon(Complex z);

/// Bolza distance: minimum over all 49 group images of z2 of the Poincare distance.
double distance(Complex z1, Complex z2);

/// Same value as `distance`, but skips images that cannot beat the current best
/// using the bound d_H(z1, w) >= |d_H(0, w) - d_H(0, z1)|.
double distance_pruned(Complex z1, Complex z2);

}  // namespace bolza

/// Per-point precomputation for repeated distance queries over a fixed point set
/// (unit vectors on the sphere, the 49 group images on the Bolza surface).
/// `distance(i, j)` returns exactly the value of `orc::distance` on the same
/// points, without validation.
class PreparedPoints {
 public:
  PreparedPoints(const Surface& surface, std::span<const SurfacePoint> points);

  std::size_t size() const { return points_.size(); }
  const Surface& surface() const { return surface_; }
  SurfacePoint point(std::size_t i) const { return points_[i]; }

  double distance(std::size_t i, std::size_t j) const;

  /// Unit vector of point i (sphere only).
  const std::array<double, 3>& unit_vector(std::size_t i) const { return unit_[i]; }
  /// Image of point i under group element g (Bolza only).
  bolza::Complex image(std::size_t i, std::size_t g) const {
    return images_[i * bolza::kGroupSize + g];
  }

 private:
  Surface surface_;
  std::vector<SurfacePoint> points_;
  std::vector<std::array<double, 3>> unit_;
  std::vector<bolza::Complex> images_;
};

}  // namespace orc
