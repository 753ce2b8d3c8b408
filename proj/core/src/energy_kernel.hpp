#pragma once

// Shared kernels for the discrete Dirichlet energy of equivariant maps.

#include <array>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "fdom/isometry.hpp"
#include "fdom/mesh.hpp"

namespace fdom::detail {


// Corner images under the current vertex values.
struct CornerImages {
  const FundamentalDomainMesh& mesh;
  const std::vector<Eigen::Matrix4d>& action;
  const std::vector<HPoint>& values;

  HPoint operator()(std::size_t f, int k) const {
    const Corner& c = mesh.faces()[f][static_cast<std::size_t>(k)];
    return action[static_cast<std::size_t>(c.deck)] * values[static_cast<std::size_t>(c.vertex)];
  }
};

inline double sq_dist(const HPoint& a, const HPoint& b) {
  const double d = distance(a, b);
  return d * d;
}

// Energy from precomputed deck actions.
inline double energy(const FundamentalDomainMesh& mesh, const std::vector<Eigen::Matrix4d>& action,
              const std::vector<HPoint>& values) {
  const CornerImages img{mesh, action, values};
  double e = 0.0;
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const std::array<HPoint, 3> p{img(f, 0), img(f, 1), img(f, 2)};
    for (int k = 0; k < 3; ++k)
      e += mesh.edge_weight(f, k) * sq_dist(p[static_cast<std::size_t>((k + 1) % 3)], p[static_cast<std::size_t>((k + 2) % 3)]);
  }
  return e;
}

// Gradient contribution of one half-edge to the endpoint at corner `self`:
// d/dx of w d(A x, B y)^2 is -2 w log_x(A^-1 B y).
inline void accumulate_tension(const FundamentalDomainMesh& mesh, const std::vector<Eigen::Matrix4d>& action,
                        const std::vector<Eigen::Matrix4d>& inverse, const std::vector<HPoint>& values, std::size_t f,
                        int k, std::vector<HTangent>& tau) {
  const auto& t = mesh.faces()[f];
  const Corner& a = t[static_cast<std::size_t>((k + 1) % 3)];
  const Corner& b = t[static_cast<std::size_t>((k + 2) % 3)];
  const double w = mesh.edge_weight(f, k);
  const auto ua = static_cast<std::size_t>(a.vertex), ub = static_cast<std::size_t>(b.vertex);
  const HPoint pa = action[static_cast<std::size_t>(a.deck)] * values[ua];
  const HPoint pb = action[static_cast<std::size_t>(b.deck)] * values[ub];
  tau[ua] += 2.0 * w * log_map(values[ua], inverse[static_cast<std::size_t>(a.deck)] * pb);
  tau[ub] += 2.0 * w * log_map(values[ub], inverse[static_cast<std::size_t>(b.deck)] * pa);
}

inline std::vector<HTangent> tension(const FundamentalDomainMesh& mesh, const std::vector<Eigen::Matrix4d>& action,
                              const std::vector<Eigen::Matrix4d>& inverse, const std::vector<HPoint>& values) {
  std::vector<HTangent> tau(values.size(), HTangent::Zero());
  for (std::size_t f = 0; f < mesh.face_count(); ++f)
    for (int k = 0; k < 3; ++k) accumulate_tension(mesh, action, inverse, values, f, k, tau);
  return tau;
}

inline std::vector<Eigen::Matrix4d> inverses(const std::vector<Eigen::Matrix4d>& action) {
  // Lorentz matrices satisfy A^-1 = J A^T J with J = diag(1, 1, 1, -1).
  const Eigen::Matrix4d j = Eigen::Vector4d(1.0, 1.0, 1.0, -1.0).asDiagonal();
  std::vector<Eigen::Matrix4d> out;
  out.reserve(action.size());
  for (const auto& a : action) out.push_back(j * a.transpose() * j);
  return out;
}

inline double sup_norm(const std::vector<HTangent>& tau) {
  double s = 0.0;
  for (const auto& t : tau) s = std::max(s, tangent_norm(t));
  return s;
}


// Orthonormal basis of the tangent space at x; the H2 slice keeps y = 0.
inline std::vector<HTangent> tangent_frame(const HPoint& x, bool h3) {
  std::vector<HTangent> out;
  const int axes[3] = {0, 2, 1};
  for (int i = 0; i < (h3 ? 3 : 2); ++i) {
    HTangent e = HTangent::Zero();
    e[axes[i]] = 1.0;
    e = project_tangent(x, e);
    for (const auto& b : out) e -= lorentz_dot(e, b) * b;
    out.push_back(e / tangent_norm(e));
  }
  return out;
}

// g(c) = arccosh(c)^2 with c = cosh d: returns (g'(c), g''(c)).
inline std::pair<double, double> sq_dist_derivatives(double d) {
  if (d < 1e-4) {
    const double d2 = d * d;
    return {2.0 - d2 / 3.0, -2.0 / 3.0 + 8.0 * d2 / 45.0};
  }
  const double s = std::sinh(d);
  return {2.0 * d / s, 2.0 * (1.0 - d * std::cosh(d) / s) / (s * s)};
}

inline Eigen::SparseMatrix<double> hessian(const FundamentalDomainMesh& mesh, const std::vector<Eigen::Matrix4d>& action,
                                    const std::vector<Eigen::Matrix4d>& inverse, const std::vector<HPoint>& values,
                                    const std::vector<std::vector<HTangent>>& frame) {
  const int dim = static_cast<int>(frame.front().size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.face_count() * 3 * 4 * static_cast<std::size_t>(dim * dim));
  for (std::size_t f = 0; f < mesh.face_count(); ++f)
    for (int k = 0; k < 3; ++k) {
      const auto& t = mesh.faces()[f];
      const Corner& a = t[static_cast<std::size_t>((k + 1) % 3)];
      const Corner& b = t[static_cast<std::size_t>((k + 2) % 3)];
      const double w = mesh.edge_weight(f, k);
      const auto ua = static_cast<std::size_t>(a.vertex), ub = static_cast<std::size_t>(b.vertex);
      // Work in the lift of a: y = M x_b and x' = M^-1 x_a with M = A^-1 B.
      const Eigen::Matrix4d m = inverse[static_cast<std::size_t>(a.deck)] * action[static_cast<std::size_t>(b.deck)];
      const Eigen::Matrix4d m_inv = inverse[static_cast<std::size_t>(b.deck)] * action[static_cast<std::size_t>(a.deck)];
      const HPoint& x = values[ua];
      const HPoint y = m * values[ub];
      const HPoint x_seen = m_inv * x;
      const double d = distance(x, y);
      const double c = std::cosh(d);
      const auto [g1, g2] = sq_dist_derivatives(d);
      const auto& fa = frame[ua];
      const auto& fb = frame[ub];
      for (int i = 0; i < dim; ++i) {
        const double xi_y = lorentz_dot(fa[static_cast<std::size_t>(i)], y);
        for (int j = 0; j < dim; ++j) {
          const double xj_y = lorentz_dot(fa[static_cast<std::size_t>(j)], y);
          const double eta_x = lorentz_dot(fb[static_cast<std::size_t>(j)], x_seen);
          const double haa = w * (g2 * xi_y * xj_y + g1 * c * (i == j ? 1.0 : 0.0));
          const double eti_x = lorentz_dot(fb[static_cast<std::size_t>(i)], x_seen);
          const double hbb = w * (g2 * eti_x * eta_x + g1 * c * (i == j ? 1.0 : 0.0));
          const double hab = w * (g2 * xi_y * eta_x - g1 * lorentz_dot(fa[static_cast<std::size_t>(i)], m * fb[static_cast<std::size_t>(j)]));
          const int ra = a.vertex * dim + i, rb = b.vertex * dim + i;
          const int ca = a.vertex * dim + j, cb = b.vertex * dim + j;
          trip.emplace_back(ra, ca, haa);
          trip.emplace_back(rb, cb, hbb);
          trip.emplace_back(ra, cb, hab);
          trip.emplace_back(cb, ra, hab);
        }
      }
    }
  const auto n = static_cast<Eigen::Index>(values.size()) * dim;
  Eigen::SparseMatrix<double> h(n, n);
  h.setFromTriplets(trip.begin(), trip.end());
  return h;
}

}  // namespace fdom::detail
