#include "fdom/wolf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/SparseCholesky>

namespace fdom {

namespace {

Eigen::VectorXd equation(const Laplacian& lap, const ScalarField& v, const ScalarField& q) {
  const Eigen::VectorXd ev = v.array().exp();
  return lap.apply(v).array() - 2.0 * ev.array() + 2.0 * q.array() / ev.array() + 2.0;
}

double weighted_rms(const Laplacian& lap, const Eigen::VectorXd& r) {
  return std::sqrt(lap.mass.dot(r.cwiseAbs2()) / lap.mass.sum());
}

}  // namespace

double wolf_residual(const FundamentalDomainMesh& mesh, const ScalarField& v, const ScalarField& q) {
  const Laplacian lap = laplacian(mesh);
  return weighted_rms(lap, equation(lap, v, q));
}

WolfSolution solve_wolf(const FundamentalDomainMesh& mesh, const FaceField& norm_sq, const WolfOptions& options) {
  if (static_cast<std::size_t>(norm_sq.size()) != mesh.face_count()) throw std::invalid_argument("normSq must be a face field");
  if ((norm_sq.array() < 0.0).any() || !norm_sq.allFinite()) throw std::invalid_argument("normSq must be finite and >= 0");
  WolfSolution sol = solve_wolf_at_vertices(mesh, faces_to_vertices(mesh, norm_sq), options);
  sol.L1 = norm_sq.cwiseQuotient(sol.H1);
  return sol;
}

WolfSolution solve_wolf_at_vertices(const FundamentalDomainMesh& mesh, const ScalarField& norm_sq,
                                    const WolfOptions& options) {
  if (static_cast<std::size_t>(norm_sq.size()) != mesh.vertex_count()) throw std::invalid_argument("normSq must be a vertex field");
  if ((norm_sq.array() < 0.0).any() || !norm_sq.allFinite()) throw std::invalid_argument("normSq must be finite and >= 0");
  const Laplacian lap = laplacian(mesh);
  WolfSolution sol;
  sol.norm_sq = norm_sq;
  const ScalarField& q = sol.norm_sq;

  ScalarField v(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i)
    v[i] = options.quadratic_root_start ? std::log(0.5 * (1.0 + std::sqrt(1.0 + 4.0 * q[i]))) : 0.0;

  Eigen::VectorXd r = equation(lap, v, q);
  double res = weighted_rms(lap, r);
  sol.trace.push_back({0, res, 0});
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  int it = 0;
  while (res > options.tol && it < options.max_iter) {
    ++it;
    // M J = L - M diag(2 e^v + 2 q e^-v) is symmetric negative definite.
    const Eigen::VectorXd ev = v.array().exp();
    const Eigen::VectorXd d = lap.mass.array() * (2.0 * ev.array() + 2.0 * q.array() / ev.array());
    Eigen::SparseMatrix<double> a = -lap.stiffness;
    for (Eigen::Index i = 0; i < a.rows(); ++i) a.coeffRef(i, i) += d[i];
    if (it == 1) solver.analyzePattern(a);
    solver.factorize(a);
    if (solver.info() != Eigen::Success) throw std::runtime_error("wolf: factorization failed");
    const Eigen::VectorXd step = solver.solve(Eigen::VectorXd(lap.mass.cwiseProduct(r)));
    double t = 1.0;
    int halvings = 0;
    bool accepted = false;
    for (; halvings <= 30; ++halvings) {
      const ScalarField trial = v + t * step;
      const Eigen::VectorXd rt = equation(lap, trial, q);
      const double rest = weighted_rms(lap, rt);
      if (rest < (1.0 - 1e-4 * t) * res || rest <= options.tol) {
        v = trial;
        r = rt;
        res = rest;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    sol.trace.push_back({it, res, halvings});
    if (!accepted) {
      // Rounding floor: accept stagnation only when already tiny.
      if (res <= 1e3 * options.tol) break;
      throw std::runtime_error("wolf: Newton stagnation at residual " + std::to_string(res));
    }
  }
  sol.u = v.array().exp();
  sol.residual = res;
  sol.newton_iters = it;
  sol.converged = res <= options.tol;
  sol.H1 = vertices_to_faces(mesh, sol.u);
  sol.L1 = vertices_to_faces(mesh, ScalarField(q.cwiseQuotient(sol.u)));
  return sol;
}

FaceForms wolf_metric(const FundamentalDomainMesh& mesh, const WolfSolution& sol, const HopfDifferential& hopf) {
  for (Eigen::Index f = 0; f < sol.H1.size(); ++f)
    if (!(sol.H1[f] > sol.L1[f])) throw std::domain_error("wolf metric: H1 <= L1 on face " + std::to_string(f));
  return assemble_form(mesh, sol.H1 + sol.L1, hopf.phi);
}

std::vector<std::array<double, 3>> wolf_edge_lengths(const FundamentalDomainMesh& mesh,
                                                     const std::vector<std::array<double, 3>>& pullback_sq,
                                                     const WolfSolution& sol, const ScalarField& e) {
  if (pullback_sq.size() != mesh.face_count()) throw std::invalid_argument("one length triple per face required");
  if (static_cast<std::size_t>(e.size()) != mesh.vertex_count() || sol.u.size() != e.size())
    throw std::invalid_argument("vertex fields required");
  const ScalarField psi = sol.u + sol.norm_sq.cwiseQuotient(sol.u) - e;
  std::vector<std::array<double, 3>> out(mesh.face_count());
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const auto vs = mesh.face_vertices(f);
    for (int k = 0; k < 3; ++k) {
      const double l0 = mesh.edge_length(f, k);
      const double s = 0.5 * (psi[vs[static_cast<std::size_t>((k + 1) % 3)]] + psi[vs[static_cast<std::size_t>((k + 2) % 3)]]);
      out[f][static_cast<std::size_t>(k)] = std::sqrt(std::max(0.0, pullback_sq[f][static_cast<std::size_t>(k)] + s * l0 * l0));
    }
  }
  return out;
}

CurvatureReport discrete_curvature(const FundamentalDomainMesh& mesh, const FaceForms& metric, double degenerate_tol) {
  if (metric.size() != mesh.face_count()) throw std::invalid_argument("one metric per face required");
  std::vector<std::array<double, 3>> face_len(mesh.face_count());
  for (std::size_t f = 0; f < mesh.face_count(); ++f)
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d& g = metric[f];
      const Eigen::Vector2d& e = mesh.frames()[f].edge[static_cast<std::size_t>(k)];
      const double sq = g[0] * e.x() * e.x() + 2.0 * g[1] * e.x() * e.y() + g[2] * e.y() * e.y();
      face_len[f][static_cast<std::size_t>(k)] = std::sqrt(std::max(0.0, sq));
    }
  return discrete_curvature(mesh, face_len, degenerate_tol);
}

CurvatureReport discrete_curvature(const FundamentalDomainMesh& mesh, const std::vector<std::array<double, 3>>& face_len,
                                   double degenerate_tol) {
  if (face_len.size() != mesh.face_count()) throw std::invalid_argument("one length triple per face required");
  const std::size_t nv = mesh.vertex_count();
  std::vector<double> angle(nv, 0.0), area(nv, 0.0);
  std::vector<int> alive(nv, 0);
  CurvatureReport rep;
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    // A metric given face by face need not agree on shared edges; both sides
    // use the mean so the triangles glue into one piecewise flat surface.
    std::array<double, 3> len{};
    double scale = 0.0;
    for (int k = 0; k < 3; ++k) {
      const auto [g, kg] = mesh.twin(f, k);
      len[static_cast<std::size_t>(k)] = 0.5 * (face_len[f][static_cast<std::size_t>(k)] + face_len[g][static_cast<std::size_t>(kg)]);
      scale = std::max(scale, len[static_cast<std::size_t>(k)]);
    }
    // Heron in the stable ordering a >= b >= c.
    std::array<double, 3> s = len;
    std::sort(s.begin(), s.end(), std::greater<>());
    const double prod = (s[0] + (s[1] + s[2])) * (s[2] - (s[0] - s[1])) * (s[2] + (s[0] - s[1])) * (s[0] + (s[1] - s[2]));
    const double a = 0.25 * std::sqrt(std::max(0.0, prod));
    if (scale <= 0.0 || *std::min_element(len.begin(), len.end()) <= degenerate_tol * scale ||
        a <= degenerate_tol * scale * scale) {
      ++rep.excluded_faces;
      continue;
    }
    const auto vs = mesh.face_vertices(f);
    for (int k = 0; k < 3; ++k) {
      const double lo = len[static_cast<std::size_t>(k)];
      const double l1 = len[static_cast<std::size_t>((k + 1) % 3)], l2 = len[static_cast<std::size_t>((k + 2) % 3)];
      const double c = std::clamp((l1 * l1 + l2 * l2 - lo * lo) / (2.0 * l1 * l2), -1.0, 1.0);
      const auto v = static_cast<std::size_t>(vs[static_cast<std::size_t>(k)]);
      angle[v] += std::acos(c);
      area[v] += a / 3.0;
      ++alive[v];
    }
  }
  // A vertex is covered when every incident face survived.
  std::vector<int> incident(nv, 0);
  for (std::size_t f = 0; f < mesh.face_count(); ++f)
    for (int v : mesh.face_vertices(f)) ++incident[static_cast<std::size_t>(v)];
  rep.kappa = ScalarField::Constant(static_cast<Eigen::Index>(nv), std::numeric_limits<double>::quiet_NaN());
  rep.covered.assign(nv, false);
  int covered = 0;
  for (std::size_t v = 0; v < nv; ++v) {
    if (alive[v] == 0 || alive[v] != incident[v]) continue;
    const double defect = 2.0 * std::numbers::pi - angle[v];
    rep.kappa[static_cast<Eigen::Index>(v)] = defect / area[v];
    rep.covered[v] = true;
    rep.total += defect;
    ++covered;
  }
  rep.coverage = nv ? static_cast<double>(covered) / static_cast<double>(nv) : 0.0;
  return rep;
}

BetaReport beta_from_pde2(const FundamentalDomainMesh& mesh, const ScalarField& h, const ScalarField& q,
                          double degenerate_rel) {
  if (static_cast<std::size_t>(h.size()) != mesh.vertex_count() || q.size() != h.size())
    throw std::invalid_argument("beta: vertex fields required");
  BetaReport rep;
  rep.beta = ScalarField::Constant(h.size(), std::numeric_limits<double>::quiet_NaN());
  rep.covered.assign(static_cast<std::size_t>(h.size()), false);
  rep.min_beta = std::numeric_limits<double>::quiet_NaN();
  if ((h.array() <= 0.0).any()) return rep;
  const ScalarField lap_log = fitted_laplacian(mesh, ScalarField(h.array().log()), 3);
  double mn = std::numeric_limits<double>::infinity();
  int covered = 0;
  for (Eigen::Index v = 0; v < h.size(); ++v) {
    const double root = std::sqrt(q[v]);
    if (!(h[v] - root > degenerate_rel * (h[v] + root))) continue;
    const double b = (lap_log[v] + 2.0) / (2.0 * (h[v] - q[v] / h[v]));
    rep.beta[v] = b;
    rep.covered[static_cast<std::size_t>(v)] = true;
    mn = std::min(mn, b);
    ++covered;
  }
  if (covered) rep.min_beta = mn;
  rep.coverage = h.size() ? static_cast<double>(covered) / static_cast<double>(h.size()) : 0.0;
  return rep;
}

}  // namespace fdom
