#include "fdom/isometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/LU>

namespace fdom {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Mat2c hermitian(const Eigen::Vector4d& v) {
  Mat2c h;
  h << Complex(v[3] + v[2], 0.0), Complex(v[0], v[1]), Complex(v[0], -v[1]), Complex(v[3] - v[2], 0.0);
  return h;
}

Eigen::Vector4d from_hermitian(const Mat2c& h) {
  return {h(0, 1).real(), h(0, 1).imag(), 0.5 * (h(0, 0).real() - h(1, 1).real()),
          0.5 * (h(0, 0).real() + h(1, 1).real())};
}

Mat2c canonicalize(Mat2c m) {
  const Complex det = m.determinant();
  if (std::abs(det) == 0.0) throw std::invalid_argument("singular Mobius matrix");
  m /= std::sqrt(det);
  const double scale = m.cwiseAbs().maxCoeff();
  for (int k = 0; k < 4; ++k) {
    const Complex e = m(k / 2, k % 2);
    if (std::abs(e) <= 1e-14 * scale) continue;
    const bool negative = std::abs(e.real()) > 1e-14 * scale ? e.real() < 0.0 : e.imag() < 0.0;
    if (negative) m = -m;
    break;
  }
  return m;
}

}  // namespace

std::string to_string(Target target) { return target == Target::H2 ? "h2" : "h3"; }

Target parse_target(const std::string& name) {
  if (name == "h2" || name == "H2") return Target::H2;
  if (name == "h3" || name == "H3") return Target::H3;
  throw std::invalid_argument("unknown target '" + name + "' (expected h2 or h3)");
}

double lorentz_dot(const HPoint& a, const HPoint& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3]; }

HPoint renormalize(const HPoint& p) {
  const double q = -lorentz_dot(p, p);
  if (!(q > 0.0)) throw std::domain_error("point is not timelike");
  HPoint out = p / std::sqrt(q);
  if (out[3] < 0) out = -out;
  return out;
}

HPoint origin() { return {0.0, 0.0, 0.0, 1.0}; }

HPoint from_upper_half_space(Complex w, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::domain_error("upper half-space point must have h > 0");
  const double n = std::norm(w) + h * h;
  return {w.real() / h, w.imag() / h, (n - 1.0) / (2.0 * h), (n + 1.0) / (2.0 * h)};
}

HPoint from_upper_half_plane(Complex z) { return from_upper_half_space(Complex(z.real(), 0.0), z.imag()); }

HPoint from_disk(Complex z) {
  if (!(std::abs(z) < 1.0)) throw std::domain_error("disk point must satisfy |z| < 1");
  const Complex i(0.0, 1.0);
  return from_upper_half_plane(i * (1.0 + z) / (1.0 - z));
}

HalfSpaceCoords to_upper_half_space(const HPoint& p) {
  const double h = 1.0 / (p[3] - p[2]);
  return {Complex(p[0], p[1]) * h, h};
}

Complex to_disk(const HPoint& p) {
  const auto c = to_upper_half_space(p);
  const Complex z(c.w.real(), c.h);
  const Complex i(0.0, 1.0);
  return (z - i) / (z + i);
}

double distance(const HPoint& a, const HPoint& b) {
  const HPoint d = a - b;
  const double q = std::max(0.0, lorentz_dot(d, d));
  return 2.0 * std::asinh(0.5 * std::sqrt(q));
}

double tangent_norm(const HTangent& v) { return std::sqrt(std::max(0.0, lorentz_dot(v, v))); }

HTangent project_tangent(const HPoint& base, const Eigen::Vector4d& v) { return v + lorentz_dot(base, v) * base; }

HTangent log_map(const HPoint& base, const HPoint& p) {
  const HTangent u = p + lorentz_dot(base, p) * base;
  const double n = tangent_norm(u);
  if (n < 1e-300) return HTangent::Zero();
  return u * (std::asinh(n) / n);
}

HPoint exp_map(const HPoint& base, const HTangent& v) {
  const double n = tangent_norm(v);
  if (n < 1e-300) return base;
  return renormalize(std::cosh(n) * base + (std::sinh(n) / n) * v);
}

Mobius::Mobius() : m_(Mat2c::Identity()) {}

Mobius::Mobius(const Mat2c& m) : m_(canonicalize(m)) {}

Mobius Mobius::real(double a, double b, double c, double d) {
  Mat2c m;
  m << a, b, c, d;
  return Mobius(m);
}

Mobius Mobius::diagonal(Complex lambda) {
  Mat2c m;
  m << lambda, 0.0, 0.0, 1.0 / lambda;
  return Mobius(m);
}

bool Mobius::is_real(double tol) const { return m_.imag().cwiseAbs().maxCoeff() <= tol; }

Mobius Mobius::operator*(const Mobius& rhs) const { return Mobius(m_ * rhs.m_); }

Mobius Mobius::inverse() const {
  Mat2c inv;
  inv << m_(1, 1), -m_(0, 1), -m_(1, 0), m_(0, 0);
  return Mobius(inv);
}

HPoint Mobius::apply(const HPoint& p) const {
  return renormalize(from_hermitian(m_ * hermitian(p) * m_.adjoint()));
}

std::optional<Complex> Mobius::apply_boundary(std::optional<Complex> z) const {
  const Complex a = m_(0, 0), b = m_(0, 1), c = m_(1, 0), d = m_(1, 1);
  if (!z) {
    if (std::abs(c) < 1e-300) return std::nullopt;
    return a / c;
  }
  const Complex den = c * *z + d;
  if (std::abs(den) < 1e-300) return std::nullopt;
  return (a * *z + b) / den;
}

Eigen::Matrix4d Mobius::lorentz() const {
  Eigen::Matrix4d out;
  for (int k = 0; k < 4; ++k) {
    Eigen::Vector4d e = Eigen::Vector4d::Zero();
    e[k] = 1.0;
    out.col(k) = from_hermitian(m_ * hermitian(e) * m_.adjoint());
  }
  return out;
}

double Mobius::distance_to_identity() const {
  const Mat2c id = Mat2c::Identity();
  return std::min((m_ - id).cwiseAbs().maxCoeff(), (m_ + id).cwiseAbs().maxCoeff());
}

double translation_length(const Mobius& phi) {
  // With lambda - 1/lambda = s, s^2 = tr^2 - 4 = (a - d)^2 + 4bc; l = 2 |Re asinh(s / 2)|.
  // Take whichever form of s^2 cancels less: tr^2 - 4 loses everything near
  // the identity, the entry form loses with large off-diagonal entries.
  const Mat2c& m = phi.matrix();
  const Complex tr = m.trace();
  const Complex ad = m(0, 0) - m(1, 1), bc = m(0, 1) * m(1, 0);
  const double err_trace = std::norm(tr) + 4.0;
  const double err_entries = std::norm(ad) + 4.0 * std::abs(bc);
  const Complex disc = err_entries < err_trace ? ad * ad + 4.0 * bc : tr * tr - 4.0;
  if (std::abs(tr.imag()) <= 1e-15 * std::max(1.0, std::abs(tr)) && std::abs(disc.imag()) <= 1e-15 * std::max(1.0, std::abs(disc))) {
    // Real trace: elliptic and parabolic elements translate by zero.
    return disc.real() > 0.0 ? 2.0 * std::asinh(0.5 * std::sqrt(disc.real())) : 0.0;
  }
  return 2.0 * std::abs(std::asinh(0.5 * std::sqrt(disc)).real());
}

HPoint BusemannRay::point_at(double t) const { return frame_.apply(from_upper_half_space(0.0, std::exp(t))); }

double BusemannRay::operator()(const HPoint& x) const {
  const HPoint y = frame_inv_.apply(x);
  // beta(w, h) = -log h and 1/h = t - z on the hyperboloid.
  return std::log(y[3] - y[2]);
}

double busemann_cocycle(const Mobius& phi, const BusemannRay& ray, double tol) {
  const Mobius psi = ray.frame().inverse() * phi * ray.frame();
  const Mat2c& m = psi.matrix();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (std::abs(m(1, 0)) > tol * scale)
    throw std::invalid_argument("isometry does not fix the ideal endpoint of the Busemann ray");
  // psi = [[alpha, *], [0, 1/alpha]] scales heights by |alpha|^2.
  return -2.0 * std::log(std::abs(m(0, 0)));
}

std::vector<std::optional<Complex>> boundary_fixed_points(const Mobius& phi) {
  const Mat2c& m = phi.matrix();
  const Complex a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const double scale = m.cwiseAbs().maxCoeff();
  const double eps = 1e-13 * scale;
  std::vector<std::optional<Complex>> out;
  if (std::abs(c) <= eps) {
    out.emplace_back(std::nullopt);
    if (std::abs(a - d) > eps) out.emplace_back(b / (d - a));
    return out;
  }
  const Complex disc = std::sqrt((a - d) * (a - d) + 4.0 * b * c);
  out.emplace_back((a - d + disc) / (2.0 * c));
  if (std::abs(disc) > 1e-10 * scale) out.emplace_back((a - d - disc) / (2.0 * c));
  return out;
}

double chordal_distance(std::optional<Complex> a, std::optional<Complex> b) {
  if (!a && !b) return 0.0;
  if (!a) return 2.0 / std::sqrt(1.0 + std::norm(*b));
  if (!b) return 2.0 / std::sqrt(1.0 + std::norm(*a));
  return 2.0 * std::abs(*a - *b) / std::sqrt((1.0 + std::norm(*a)) * (1.0 + std::norm(*b)));
}

double Representation::relator_residual() const { return evaluate(*this, presentation.relator()).distance_to_identity(); }

Mobius evaluate(const Representation& rho, const Word& word) {
  Mat2c acc = Mat2c::Identity();
  for (const Letter& l : word.letters()) {
    const Mobius& g = rho.images.at(static_cast<std::size_t>(l.gen));
    acc = acc * (l.exp > 0 ? g.matrix() : g.inverse().matrix());
  }
  return Mobius(acc);
}

Representation trivial_representation(int genus, Target target) {
  Representation rho;
  rho.presentation = SurfaceGroupPresentation(genus);
  rho.images.assign(static_cast<std::size_t>(2 * genus), Mobius());
  rho.target = target;
  return rho;
}

Representation conjugate(const Representation& rho, const Mobius& psi) {
  Representation out = rho;
  const Mobius psi_inv = psi.inverse();
  for (auto& g : out.images) g = psi * g * psi_inv;
  return out;
}

std::string to_string(BoundaryOrbitKind kind) {
  switch (kind) {
    case BoundaryOrbitKind::nonelementary: return "nonelementary";
    case BoundaryOrbitKind::fixed_point: return "fixed_point";
    case BoundaryOrbitKind::fixed_pair: return "fixed_pair";
    case BoundaryOrbitKind::finite_orbit_ge3: return "finite_orbit_ge3";
  }
  return "unknown";
}

BoundaryOrbitReport boundary_orbit_analysis(const Representation& rho, double tol) {
  BoundaryOrbitReport report;
  report.tolerance = tol;

  std::vector<Mobius> moving;
  for (const auto& g : rho.images)
    if (g.distance_to_identity() > tol) moving.push_back(g);
  if (moving.empty()) {
    report.kind = BoundaryOrbitKind::fixed_point;
    report.trivial = true;
    report.points = {std::nullopt};
    return report;
  }

  auto fixes = [&](const Mobius& g, std::optional<Complex> p, double t) {
    return chordal_distance(g.apply_boundary(p), p) <= t;
  };

  // Common fixed points are among the fixed points of any single moving generator.
  std::vector<std::optional<Complex>> common;
  for (const auto& p : boundary_fixed_points(moving.front())) {
    bool all = true, near = true;
    for (const auto& g : moving) {
      all = all && fixes(g, p, tol);
      near = near && fixes(g, p, 100.0 * tol);
    }
    if (all)
      common.push_back(p);
    else if (near)
      report.borderline = true;
  }
  if (common.size() >= 2) {
    report.kind = BoundaryOrbitKind::fixed_pair;
    report.points = {common[0], common[1]};
    return report;
  }
  if (common.size() == 1) {
    report.kind = BoundaryOrbitKind::fixed_point;
    report.points = common;
    return report;
  }

  // Finite orbits: probe generator fixed points and a few generic points.
  std::vector<std::optional<Complex>> probes = {std::nullopt, Complex(0.0), Complex(1.0), Complex(0.0, 1.0),
                                                Complex(0.3, -0.7)};
  for (const auto& g : moving)
    for (const auto& p : boundary_fixed_points(g)) probes.push_back(p);

  constexpr std::size_t kMaxOrbit = 24;
  for (const auto& probe : probes) {
    std::vector<std::optional<Complex>> orbit = {probe};
    bool closed = true;
    for (std::size_t i = 0; i < orbit.size() && closed; ++i) {
      for (const auto& g : moving) {
        for (const auto& h : {g, g.inverse()}) {
          const auto q = h.apply_boundary(orbit[i]);
          const bool seen = std::any_of(orbit.begin(), orbit.end(),
                                        [&](const auto& o) { return chordal_distance(o, q) <= tol; });
          if (!seen) {
            if (orbit.size() >= kMaxOrbit) {
              closed = false;
              break;
            }
            orbit.push_back(q);
          }
        }
        if (!closed) break;
      }
    }
    if (closed && orbit.size() >= 3) {
      report.kind = BoundaryOrbitKind::finite_orbit_ge3;
      report.points = orbit;
      return report;
    }
    if (closed && orbit.size() == 2) report.borderline = true;  // swapped pair
  }
  report.kind = BoundaryOrbitKind::nonelementary;
  return report;
}

namespace {

// Element of the universal cover of SL(2,R), acting on the ray circle
// R / 2pi by theta -> arg(A (cos theta, sin theta)); `at_zero` is the lifted
// image of 0.
struct CircleLift {
  Eigen::Matrix2d a;
  double at_zero;

  static double ray_angle(const Eigen::Matrix2d& m, double theta) {
    const Eigen::Vector2d v = m * Eigen::Vector2d(std::cos(theta), std::sin(theta));
    return std::atan2(v[1], v[0]);
  }

  double operator()(double theta) const {
    const double k = std::floor(theta / kTwoPi);
    const double base = theta - k * kTwoPi;
    double delta = std::fmod(ray_angle(a, base) - ray_angle(a, 0.0), kTwoPi);
    if (delta < 0) delta += kTwoPi;
    return at_zero + delta + k * kTwoPi;
  }

  CircleLift compose(const CircleLift& rhs) const { return {a * rhs.a, (*this)(rhs.at_zero)}; }

  CircleLift inverse() const {
    const Eigen::Matrix2d inv = a.inverse();
    double x = ray_angle(inv, 0.0);
    if (x < 0) x += kTwoPi;
    const double y = (*this)(x);
    return {inv, x - kTwoPi * std::round(y / kTwoPi)};
  }
};

}  // namespace

int euler_class(const Representation& rho) {
  if (rho.target != Target::H2) throw std::invalid_argument("Euler class is defined for PSL(2,R) representations");
  std::vector<CircleLift> lifts;
  for (const auto& g : rho.images) {
    if (!g.is_real(1e-10)) throw std::invalid_argument("Euler class requires real generator images");
    Eigen::Matrix2d m = g.matrix().real();
    lifts.push_back({m, CircleLift::ray_angle(m, 0.0)});
  }
  CircleLift acc{Eigen::Matrix2d::Identity(), 0.0};
  for (const Letter& l : rho.presentation.relator().letters()) {
    const CircleLift& g = lifts[static_cast<std::size_t>(l.gen)];
    acc = acc.compose(l.exp > 0 ? g : g.inverse());
  }
  // The relator lifts to a rotation by e * pi on the ray circle (a full turn of RP^1).
  const double turns = acc.at_zero / std::numbers::pi;
  const double e = std::round(turns);
  if (std::abs(turns - e) > 1e-6) throw std::runtime_error("relator lift is not central; representation relator fails");
  return static_cast<int>(e);
}

}  // namespace fdom
