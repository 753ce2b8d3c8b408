#include "fdom/holonomy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

namespace fdom {

namespace {

Complex uhp(const HPoint& p) {
  const auto hs = to_upper_half_space(p);
  return {hs.w.real(), hs.h};
}

// Sends i to z.
Mobius lift_to(Complex z) {
  const double s = std::sqrt(z.imag());
  return Mobius::real(s, z.real() / s, 0.0, 1.0 / s);
}

// Counterclockwise rotation by theta about i.
Mobius rotation(double theta) {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  return Mobius::real(c, s, -s, c);
}

// Isometry taking i to p with the upward direction at i sent toward q.
Mobius frame(const HPoint& p, const HPoint& q) {
  const Mobius a = lift_to(uhp(p));
  const Complex w = uhp(a.inverse().apply(q));
  // Cayley transform to the disk: up at i is the positive real direction at 0.
  const Complex z = (w - Complex(0.0, 1.0)) / (w + Complex(0.0, 1.0));
  return a * rotation(std::arg(z));
}

// Point at distance l from p, at angle theta counterclockwise from the direction toward q.
HPoint place(const HPoint& p, const HPoint& q, double l, double theta) {
  return (frame(p, q) * rotation(theta)).apply(from_upper_half_plane(Complex(0.0, std::exp(l))));
}

// exp of sum t_k E_k for the basis diag(1,-1)/2, offdiag(1,1)/2, offdiag(1,-1)/2 of sl(2,R).
Mobius sl2_exp(const Eigen::Vector3d& t) {
  Mat2c x;
  x << 0.5 * t[0], 0.5 * (t[1] + t[2]), 0.5 * (t[1] - t[2]), -0.5 * t[0];
  const Complex d = std::sqrt(Complex(-(x.determinant())));
  Mat2c e;
  if (std::abs(d) < 1e-12)
    e = Mat2c::Identity() + x;
  else
    e = std::cosh(d) * Mat2c::Identity() + (std::sinh(d) / d) * x;
  return Mobius(e);
}

Eigen::VectorXd fit_residual(const Mobius& m, const std::vector<HPoint>& from, const std::vector<HPoint>& to) {
  Eigen::VectorXd r(2 * static_cast<Eigen::Index>(from.size()));
  for (std::size_t i = 0; i < from.size(); ++i) r.segment<2>(2 * static_cast<Eigen::Index>(i)) = normal_coordinates(to[i], m.apply(from[i]));
  return r;
}

}  // namespace

EdgeLengthTable edge_lengths(const FundamentalDomainMesh& mesh, const FaceForms& metric) {
  if (metric.size() != mesh.face_count()) throw std::invalid_argument("one metric per face required");
  EdgeLengths per(mesh.face_count());
  for (std::size_t f = 0; f < mesh.face_count(); ++f)
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector2d& e = mesh.frames()[f].edge[static_cast<std::size_t>(k)];
      const Eigen::Vector3d& g = metric[f];
      per[f][static_cast<std::size_t>(k)] = std::sqrt(std::max(0.0, g[0] * e.x() * e.x() + 2.0 * g[1] * e.x() * e.y() + g[2] * e.y() * e.y()));
    }
  return edge_lengths(mesh, per);
}

EdgeLengthTable edge_lengths(const FundamentalDomainMesh& mesh, const EdgeLengths& per_face) {
  if (per_face.size() != mesh.face_count()) throw std::invalid_argument("one length triple per face required");
  EdgeLengthTable t;
  t.per_face = per_face;
  t.averaged.resize(per_face.size());
  double sum = 0.0;
  int count = 0;
  for (std::size_t f = 0; f < per_face.size(); ++f)
    for (int k = 0; k < 3; ++k) {
      const auto [g, kg] = mesh.twin(f, k);
      const double a = per_face[f][static_cast<std::size_t>(k)], b = per_face[g][static_cast<std::size_t>(kg)];
      const double mean = 0.5 * (a + b);
      t.averaged[f][static_cast<std::size_t>(k)] = mean;
      if (mean > 0.0) {
        sum += std::pow((a - b) / mean, 2);
        ++count;
      }
    }
  t.mismatch_rms = count ? std::sqrt(sum / count) : 0.0;
  return t;
}

double hyperbolic_law_of_cosines(double a, double b, double c) {
  if (!(a > 0.0 && b > 0.0 && c > 0.0 && a + b > c && b + c > a && a + c > b))
    throw std::domain_error("lengths violate the triangle inequality");
  // Half-angle form of cosh c = cosh a cosh b - sinh a sinh b cos C, accurate for thin triangles.
  const double s2 = std::sinh(0.5 * (c + a - b)) * std::sinh(0.5 * (c - a + b)) / (std::sinh(a) * std::sinh(b));
  return 2.0 * std::asin(std::sqrt(std::clamp(s2, 0.0, 1.0)));
}

Uniformization uniformize_lengths(const FundamentalDomainMesh& mesh, const EdgeLengths& lengths, double tol,
                                  int max_iter) {
  const std::size_t nf = mesh.face_count();
  if (lengths.size() != nf) throw std::invalid_argument("one length triple per face required");
  const auto nv = static_cast<Eigen::Index>(mesh.vertex_count());
  auto scaled = [&](const ScalarField& u, EdgeLengths& out) {
    out.resize(nf);
    for (std::size_t f = 0; f < nf; ++f) {
      const auto vs = mesh.face_vertices(f);
      for (int k = 0; k < 3; ++k) {
        const double l = lengths[f][static_cast<std::size_t>(k)];
        const double s = std::exp(0.5 * (u[vs[static_cast<std::size_t>((k + 1) % 3)]] + u[vs[static_cast<std::size_t>((k + 2) % 3)]]));
        out[f][static_cast<std::size_t>(k)] = 2.0 * std::asinh(s * std::sinh(0.5 * l));
      }
    }
  };
  // Angle sums minus 2 pi, and optionally their Jacobian in u.
  auto defects = [&](const EdgeLengths& l, Eigen::SparseMatrix<double>* jac) {
    Eigen::VectorXd g = Eigen::VectorXd::Constant(nv, -2.0 * std::numbers::pi);
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t f = 0; f < nf; ++f) {
      const auto vs = mesh.face_vertices(f);
      const auto& t = l[f];
      for (int k = 0; k < 3; ++k) {
        const double c = t[static_cast<std::size_t>(k)], a = t[static_cast<std::size_t>((k + 1) % 3)],
                     b = t[static_cast<std::size_t>((k + 2) % 3)];
        const double gamma = hyperbolic_law_of_cosines(a, b, c);
        g[vs[static_cast<std::size_t>(k)]] += gamma;
        if (!jac) continue;
        const double den = std::sinh(a) * std::sinh(b) * std::sin(gamma);
        // d gamma / d(edge m) for m = k (opposite), k+1 (a), k+2 (b).
        const std::array<double, 3> dl{std::sinh(c) / den,
                                       -(std::sinh(a) * std::cosh(b) - std::cosh(a) * std::sinh(b) * std::cos(gamma)) / den,
                                       -(std::sinh(b) * std::cosh(a) - std::cosh(b) * std::sinh(a) * std::cos(gamma)) / den};
        for (int m = 0; m < 3; ++m) {
          const int edge = (k + m) % 3;
          const double d = dl[static_cast<std::size_t>(m)] * std::tanh(0.5 * t[static_cast<std::size_t>(edge)]);
          trip.emplace_back(vs[static_cast<std::size_t>(k)], vs[static_cast<std::size_t>((edge + 1) % 3)], d);
          trip.emplace_back(vs[static_cast<std::size_t>(k)], vs[static_cast<std::size_t>((edge + 2) % 3)], d);
        }
      }
    }
    if (jac) {
      jac->resize(nv, nv);
      jac->setFromTriplets(trip.begin(), trip.end());
    }
    return g;
  };

  Uniformization out;
  out.u = ScalarField::Zero(nv);
  out.lengths = lengths;
  Eigen::SparseMatrix<double> jac;
  Eigen::VectorXd g = defects(out.lengths, &jac);
  out.initial_defect = g.cwiseAbs().maxCoeff();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  for (; out.iterations < max_iter && g.cwiseAbs().maxCoeff() > tol; ++out.iterations) {
    // Angle sums decrease as lengths grow: -J is positive definite.
    Eigen::SparseMatrix<double> a = -jac;
    if (out.iterations == 0) solver.analyzePattern(a);
    solver.factorize(a);
    if (solver.info() != Eigen::Success) break;
    const Eigen::VectorXd step = solver.solve(g);
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h < 30 && !accepted; ++h, t *= 0.5) {
      const ScalarField trial = out.u + t * step;
      EdgeLengths l;
      scaled(trial, l);
      Eigen::VectorXd gt;
      try {
        gt = defects(l, nullptr);
      } catch (const std::domain_error&) {
        continue;
      }
      if (gt.norm() < (1.0 - 1e-4 * t) * g.norm()) {
        out.u = trial;
        out.lengths = std::move(l);
        g = defects(out.lengths, &jac);
        accepted = true;
      }
    }
    if (!accepted) break;
  }
  out.max_angle_defect = g.cwiseAbs().maxCoeff();
  out.converged = out.max_angle_defect <= tol;
  return out;
}

Mobius fit_isometry(const std::vector<HPoint>& from, const std::vector<HPoint>& to) {
  if (from.size() != to.size() || from.size() < 2) throw std::invalid_argument("fit_isometry needs two or more pairs");
  std::size_t second = 1;
  while (second < from.size() && distance(from[0], from[second]) < 1e-9) ++second;
  if (second == from.size()) throw std::invalid_argument("fit_isometry: coincident points");
  const Mobius m0 = frame(to[0], to[second]) * frame(from[0], from[second]).inverse();
  // One Gauss-Newton step on m0 exp(X) with a forward-difference Jacobian.
  const Eigen::VectorXd r0 = fit_residual(m0, from, to);
  Eigen::MatrixXd jac(r0.size(), 3);
  const double h = 1e-7;
  for (int k = 0; k < 3; ++k) {
    Eigen::Vector3d t = Eigen::Vector3d::Zero();
    t[k] = h;
    jac.col(k) = (fit_residual(m0 * sl2_exp(t), from, to) - r0) / h;
  }
  const Eigen::Vector3d step = jac.colPivHouseholderQr().solve(-r0);
  const Mobius m1 = m0 * sl2_exp(step);
  return fit_residual(m1, from, to).squaredNorm() < r0.squaredNorm() ? m1 : m0;
}

DevelopedStructure develop(const FundamentalDomainMesh& mesh, const EdgeLengths& lengths, std::size_t root_face) {
  const std::size_t nf = mesh.face_count();
  if (lengths.size() != nf) throw std::invalid_argument("one length triple per face required");
  if (root_face >= nf) throw std::out_of_range("root face");
  std::string bad;
  int nbad = 0;
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& l = lengths[f];
    if (!(l[0] > 0.0 && l[1] > 0.0 && l[2] > 0.0 && l[0] + l[1] > l[2] && l[1] + l[2] > l[0] && l[0] + l[2] > l[1])) {
      if (nbad++ < 20) bad += (bad.empty() ? "" : ",") + std::to_string(f);
    }
  }
  if (nbad) throw std::domain_error("triangle inequality violated on faces " + bad + (nbad > 20 ? ",..." : ""));

  DevelopedStructure out;
  out.corners.resize(nf);
  out.lift.resize(nf);
  std::vector<bool> placed(nf, false);
  auto len = [&](std::size_t f, int k) { return lengths[f][static_cast<std::size_t>(((k % 3) + 3) % 3)]; };
  // Corner a+2 of face f sits to the left of the directed edge a -> a+1.
  auto third = [&](std::size_t f, int a, const HPoint& pa, const HPoint& pb) {
    const double theta = hyperbolic_law_of_cosines(len(f, a + 2), len(f, a + 1), len(f, a));
    return place(pa, pb, len(f, a + 1), theta);
  };

  {
    const HPoint p0 = origin();
    const HPoint p1 = from_disk(Complex(std::tanh(0.5 * len(root_face, 2)), 0.0));
    out.corners[root_face] = {p0, p1, third(root_face, 0, p0, p1)};
    placed[root_face] = true;
  }

  struct Crossing {
    std::size_t f;
    int k;
  };
  std::vector<Crossing> again;
  std::deque<std::size_t> queue{root_face};
  std::vector<bool> expanded(nf, false);
  // 0-1 breadth-first order: edges with an empty deck word are taken first.
  while (!queue.empty()) {
    const std::size_t f = queue.front();
    queue.pop_front();
    if (expanded[f]) continue;
    expanded[f] = true;
    for (int k = 0; k < 3; ++k) {
      const auto [g, kg] = mesh.twin(f, k);
      if (placed[g]) {
        again.push_back({f, k});
        continue;
      }
      const Word t = mesh.transition(f, k);
      // Shared edge: corners k+1, k+2 of f are corners kg+2, kg+1 of g.
      std::array<HPoint, 3> c;
      c[static_cast<std::size_t>((kg + 1) % 3)] = out.corners[f][static_cast<std::size_t>((k + 2) % 3)];
      c[static_cast<std::size_t>((kg + 2) % 3)] = out.corners[f][static_cast<std::size_t>((k + 1) % 3)];
      c[static_cast<std::size_t>(kg)] = third(g, kg + 1, c[static_cast<std::size_t>((kg + 1) % 3)], c[static_cast<std::size_t>((kg + 2) % 3)]);
      out.corners[g] = c;
      out.lift[g] = reduce(out.lift[f] * t);
      placed[g] = true;
      if (t.empty())
        queue.push_front(g);
      else
        queue.push_back(g);
    }
  }

  const int ngen = mesh.base_holonomy().presentation.generator_count();
  std::vector<std::vector<HPoint>> from(static_cast<std::size_t>(ngen)), to(static_cast<std::size_t>(ngen));
  for (const auto& [f, k] : again) {
    const auto [g, kg] = mesh.twin(f, k);
    const Word eta = reduce(out.lift[f] * mesh.transition(f, k) * out.lift[g].inverse());
    if (eta.size() != 1) continue;
    // Copy of g developed from f's side.
    std::array<HPoint, 3> c;
    c[static_cast<std::size_t>((kg + 1) % 3)] = out.corners[f][static_cast<std::size_t>((k + 2) % 3)];
    c[static_cast<std::size_t>((kg + 2) % 3)] = out.corners[f][static_cast<std::size_t>((k + 1) % 3)];
    c[static_cast<std::size_t>(kg)] = third(g, kg + 1, c[static_cast<std::size_t>((kg + 1) % 3)], c[static_cast<std::size_t>((kg + 2) % 3)]);
    const auto gen = static_cast<std::size_t>(eta[0].gen);
    for (int i = 0; i < 3; ++i) {
      const HPoint& x = out.corners[g][static_cast<std::size_t>(i)];
      const HPoint& y = c[static_cast<std::size_t>(i)];
      if (eta[0].exp > 0) {
        from[gen].push_back(x);
        to[gen].push_back(y);
      } else {
        from[gen].push_back(y);
        to[gen].push_back(x);
      }
    }
  }

  out.j.presentation = mesh.base_holonomy().presentation;
  out.j.target = Target::H2;
  for (int gi = 0; gi < ngen; ++gi) {
    const auto& xs = from[static_cast<std::size_t>(gi)];
    const auto& ys = to[static_cast<std::size_t>(gi)];
    if (xs.size() < 2) throw std::runtime_error("develop: no pairing data for generator " + std::to_string(gi));
    const Mobius m = fit_isometry(xs, ys);
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) s += std::pow(distance(m.apply(xs[i]), ys[i]), 2);
    out.j.images.push_back(m);
    out.fits.push_back({gi, static_cast<int>(xs.size()), std::sqrt(s / static_cast<double>(xs.size()))});
  }
  out.relator_residual = out.j.relator_residual();
  return out;
}

}  // namespace fdom
