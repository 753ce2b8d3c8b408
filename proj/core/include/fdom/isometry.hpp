#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fdom/group.hpp"

namespace fdom {

using Complex = std::complex<double>;
using Mat2c = Eigen::Matrix2cd;

enum class Target { H2, H3 };

std::string to_string(Target target);
Target parse_target(const std::string& name);

/// Point of H^3 on the hyperboloid {x^2 + y^2 + z^2 - t^2 = -1, t > 0}.
/// H^2 is the totally geodesic slice y = 0, which corresponds to the vertical
/// half-plane over the real axis in the upper half-space model.
using HPoint = Eigen::Vector4d;
/// Tangent vector at an HPoint (Lorentz-orthogonal to the point).
using HTangent = Eigen::Vector4d;

double lorentz_dot(const HPoint& a, const HPoint& b);
/// Projects a nearly-hyperboloid vector back onto the upper sheet.
HPoint renormalize(const HPoint& p);

HPoint origin();
/// Upper half-space point (w, h), h > 0. Throws std::domain_error when h <= 0.
HPoint from_upper_half_space(Complex w, double h);
/// Upper half-plane point z, Im z > 0 (H^2 slice).
HPoint from_upper_half_plane(Complex z);
/// Poincare disk point |z| < 1, via the Cayley transform onto the upper half-plane.
HPoint from_disk(Complex z);

struct HalfSpaceCoords {
  Complex w;
  double h;
};
HalfSpaceCoords to_upper_half_space(const HPoint& p);
/// Disk coordinate of an H^2 point; the y component is ignored.
Complex to_disk(const HPoint& p);

/// Hyperbolic distance, accurate for nearby points.
double distance(const HPoint& a, const HPoint& b);
/// Riemannian log map: tangent vector at `base` pointing to `p` with norm d(base, p).
HTangent log_map(const HPoint& base, const HPoint& p);
HPoint exp_map(const HPoint& base, const HTangent& v);
double tangent_norm(const HTangent& v);
/// Removes the component of v along `base`.
HTangent project_tangent(const HPoint& base, const Eigen::Vector4d& v);

/// Orientation-preserving isometry of H^3 as an element of PSL(2, C); H^2
/// isometries are the real elements. Stored with det = 1 and the canonical sign
/// (first nonzero entry has positive real part, or positive imaginary part if
/// its real part vanishes).
class Mobius {
public:
  Mobius();  // identity
  explicit Mobius(const Mat2c& m);
  static Mobius real(double a, double b, double c, double d);
  static Mobius diagonal(Complex lambda);  // diag(lambda, 1/lambda)

  const Mat2c& matrix() const { return m_; }
  Complex trace() const { return m_.trace(); }
  bool is_real(double tol = 1e-12) const;

  Mobius operator*(const Mobius& rhs) const;
  Mobius inverse() const;

  HPoint apply(const HPoint& p) const;
  /// Action on the ideal boundary CP^1; nullopt encodes infinity.
  std::optional<Complex> apply_boundary(std::optional<Complex> z) const;
  /// 4x4 Lorentz matrix of the induced action on the hyperboloid.
  Eigen::Matrix4d lorentz() const;

  /// max |entry| distance to +-identity.
  double distance_to_identity() const;

private:
  Mat2c m_;
};

/// Translation length inf_x d(x, phi x) = 2 |Re arccosh(tr/2)|.
double translation_length(const Mobius& phi);

/// Busemann function for the ray t -> frame(i e^t) in the upper half-space; the
/// ray tends to the ideal point frame(infinity). beta(frame(i e^s)) = -s.
class BusemannRay {
public:
  explicit BusemannRay(Mobius frame = Mobius()) : frame_(std::move(frame)), frame_inv_(frame_.inverse()) {}

  const Mobius& frame() const { return frame_; }
  std::optional<Complex> ideal_point() const { return frame_.apply_boundary(std::nullopt); }
  HPoint point_at(double t) const;
  double operator()(const HPoint& x) const;

private:
  Mobius frame_;
  Mobius frame_inv_;
};

/// m(phi) with beta(phi x) = beta(x) + m(phi). Throws std::invalid_argument when
/// phi does not fix the ray's ideal point within `tol`.
double busemann_cocycle(const Mobius& phi, const BusemannRay& ray, double tol = 1e-8);

/// Fixed points on CP^1 of a non-identity element (one or two; nullopt = infinity).
std::vector<std::optional<Complex>> boundary_fixed_points(const Mobius& phi);
/// Chordal distance on the Riemann sphere.
double chordal_distance(std::optional<Complex> a, std::optional<Complex> b);

struct Representation {
  SurfaceGroupPresentation presentation{2};
  std::vector<Mobius> images;  // indexed by generator
  Target target = Target::H2;

  int genus() const { return presentation.genus(); }
  /// min over signs of max-entry |rho(R) -+ I|.
  double relator_residual() const;
};

Mobius evaluate(const Representation& rho, const Word& word);

Representation trivial_representation(int genus, Target target = Target::H2);
/// Conjugates every generator image: psi rho(.) psi^-1.
Representation conjugate(const Representation& rho, const Mobius& psi);

enum class BoundaryOrbitKind { nonelementary, fixed_point, fixed_pair, finite_orbit_ge3 };
std::string to_string(BoundaryOrbitKind kind);

struct BoundaryOrbitReport {
  BoundaryOrbitKind kind = BoundaryOrbitKind::nonelementary;
  std::vector<std::optional<Complex>> points;
  double tolerance = 1e-8;
  /// Every generator is (numerically) the identity, so every point is fixed.
  bool trivial = false;
  /// Set when a candidate point was within 100x tolerance but failed the test.
  bool borderline = false;
};

BoundaryOrbitReport boundary_orbit_analysis(const Representation& rho, double tol = 1e-8);

/// Euler class of a PSL(2,R) representation, read off the lift of the relator
/// to the universal cover. Throws std::invalid_argument for H3 targets or
/// non-real generator images.
int euler_class(const Representation& rho);

}  // namespace fdom
