#include "fdom/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/SparseCholesky>

#include "energy_kernel.hpp"

namespace fdom {

namespace {

using namespace detail;

void check_values(const FundamentalDomainMesh& mesh, const EquivariantVertexMap& f) {
  if (f.values.size() != mesh.vertex_count()) throw std::invalid_argument("vertex map size does not match mesh");
  if (static_cast<int>(f.rep.images.size()) != 2 * mesh.genus())
    throw std::invalid_argument("representation genus does not match mesh");
  for (const auto& v : f.values)
    if (!v.allFinite() || v[3] > 1e12) throw std::domain_error("vertex image at numerical infinity");
}

double deck_shift(const Word& w, const std::vector<double>& periods) {
  double s = 0.0;
  for (const Letter& l : w.letters()) s += l.exp * periods[static_cast<std::size_t>(l.gen)];
  return s;
}

}  // namespace

std::vector<Eigen::Matrix4d> deck_action(const FundamentalDomainMesh& mesh, const Representation& rho) {
  std::vector<Eigen::Matrix4d> out;
  out.reserve(mesh.decks().size());
  for (const Word& w : mesh.decks()) out.push_back(evaluate(rho, w).lorentz());
  return out;
}

std::vector<std::array<double, 3>> squared_edge_images(const FundamentalDomainMesh& mesh, const EquivariantVertexMap& f) {
  check_values(mesh, f);
  const auto action = deck_action(mesh, f.rep);
  const CornerImages img{mesh, action, f.values};
  std::vector<std::array<double, 3>> out(mesh.face_count());
  for (std::size_t fi = 0; fi < mesh.face_count(); ++fi) {
    const std::array<HPoint, 3> p{img(fi, 0), img(fi, 1), img(fi, 2)};
    for (int k = 0; k < 3; ++k)
      out[fi][static_cast<std::size_t>(k)] = sq_dist(p[static_cast<std::size_t>((k + 1) % 3)], p[static_cast<std::size_t>((k + 2) % 3)]);
  }
  return out;
}

EquivariantVertexMap identity_map(const FundamentalDomainMesh& mesh, const Representation& rho) {
  return {rho, mesh.vertices()};
}

EquivariantVertexMap orbit_map(const FundamentalDomainMesh& mesh, const Representation& rho, const HPoint& base) {
  return {rho, std::vector<HPoint>(mesh.vertex_count(), base)};
}

EquivariantVertexMap random_map(const FundamentalDomainMesh& mesh, const Representation& rho, std::uint64_t seed,
                                double spread) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  EquivariantVertexMap f = orbit_map(mesh, rho);
  const bool h3 = rho.target == Target::H3;
  for (auto& v : f.values) {
    HTangent t(u(rng), h3 ? u(rng) : 0.0, u(rng), 0.0);
    if (t.norm() > 1.0) t /= t.norm();
    v = exp_map(origin(), spread * t);
  }
  return f;
}

FaceField energy_density(const FundamentalDomainMesh& mesh, const EquivariantVertexMap& f) {
  const auto sq = squared_edge_images(mesh, f);
  FaceField e(static_cast<Eigen::Index>(mesh.face_count()));
  for (std::size_t fi = 0; fi < mesh.face_count(); ++fi) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += mesh.edge_weight(fi, k) * sq[fi][static_cast<std::size_t>(k)];
    e[static_cast<Eigen::Index>(fi)] = s / mesh.frames()[fi].area;
  }
  return e;
}

double total_energy(const FundamentalDomainMesh& mesh, const EquivariantVertexMap& f) {
  check_values(mesh, f);
  return energy(mesh, deck_action(mesh, f.rep), f.values);
}

std::vector<HTangent> discrete_tension(const FundamentalDomainMesh& mesh, const EquivariantVertexMap& f) {
  check_values(mesh, f);
  const auto action = deck_action(mesh, f.rep);
  return tension(mesh, action, inverses(action), f.values);
}

Eigen::SparseMatrix<double> energy_hessian(const FundamentalDomainMesh& mesh, const EquivariantVertexMap& f,
                                           std::vector<std::vector<HTangent>>* frames) {
  check_values(mesh, f);
  const auto action = deck_action(mesh, f.rep);
  std::vector<std::vector<HTangent>> frame;
  for (const auto& x : f.values) frame.push_back(tangent_frame(x, f.rep.target == Target::H3));
  auto h = hessian(mesh, action, inverses(action), f.values, frame);
  if (frames) *frames = std::move(frame);
  return h;
}

double binding_residual(const FundamentalDomainMesh& mesh, const EquivariantVertexMap& f) {
  check_values(mesh, f);
  auto image = [&](int p) {
    return evaluate(f.rep, mesh.decks()[static_cast<std::size_t>(mesh.deck(p))])
        .apply(f.values[static_cast<std::size_t>(mesh.rep(p))]);
  };
  double r = 0.0;
  for (const auto& pr : mesh.pairings()) {
    const Mobius g = evaluate(f.rep, pr.word);
    for (std::size_t i = 0; i < pr.from_chain.size(); ++i)
      r = std::max(r, distance(image(pr.to_chain[i]), g.apply(image(pr.from_chain[i]))));
  }
  return r;
}

FlowReport harmonic_flow(const FundamentalDomainMesh& mesh, EquivariantVertexMap& f, const FlowOptions& options) {
  check_values(mesh, f);
  const auto action = deck_action(mesh, f.rep);
  const auto inverse = inverses(action);
  const std::size_t nv = mesh.vertex_count();

  FlowReport report;
  report.tolerance = options.tol > 0.0 ? options.tol : 1e-8 * mesh.mean_edge_weight();

  // Per-vertex total weight and incident half-edges.
  std::vector<double> weight(nv, 0.0);
  std::vector<std::vector<std::pair<std::size_t, int>>> incident(nv);
  for (std::size_t fi = 0; fi < mesh.face_count(); ++fi)
    for (int k = 0; k < 3; ++k) {
      const auto& t = mesh.faces()[fi];
      const auto a = static_cast<std::size_t>(t[static_cast<std::size_t>((k + 1) % 3)].vertex);
      const auto b = static_cast<std::size_t>(t[static_cast<std::size_t>((k + 2) % 3)].vertex);
      weight[a] += 2.0 * mesh.edge_weight(fi, k);
      weight[b] += 2.0 * mesh.edge_weight(fi, k);
      incident[a].emplace_back(fi, k);
      if (b != a) incident[b].emplace_back(fi, k);
    }

  const std::vector<HPoint> start = f.values;
  double e = energy(mesh, action, f.values);
  auto tau = tension(mesh, action, inverse, f.values);
  double sup = sup_norm(tau);
  report.trace.push_back({0, e, sup});
  double step = 1.0;
  const double noise = 1e-13;  // relative rounding level of an energy sum
  const bool h3 = f.rep.target == Target::H3;

  auto local_energy = [&](std::size_t v, const std::vector<HPoint>& vals) {
    const CornerImages img{mesh, action, vals};
    double s = 0.0;
    for (const auto& [fi, k] : incident[v])
      s += mesh.edge_weight(fi, k) * sq_dist(img(fi, (k + 1) % 3), img(fi, (k + 2) % 3));
    return s;
  };

  int it = 0;
  while (sup > report.tolerance && it < options.max_iter) {
    ++it;
    if (options.schedule != Schedule::gauss_seidel) {
      std::vector<HTangent> dir(nv);
      if (options.schedule == Schedule::newton) {
        std::vector<std::vector<HTangent>> frame;
        for (const auto& x : f.values) frame.push_back(tangent_frame(x, h3));
        const auto dim = static_cast<Eigen::Index>(frame.front().size());
        Eigen::SparseMatrix<double> hess = hessian(mesh, action, inverse, f.values, frame);
        // A small shift keeps the solve defined when E has flat directions.
        double diag = 0.0;
        for (Eigen::Index i = 0; i < hess.rows(); ++i) diag = std::max(diag, hess.coeff(i, i));
        Eigen::SparseMatrix<double> shift(hess.rows(), hess.cols());
        shift.setIdentity();
        hess += (1e-10 * diag) * shift;
        Eigen::VectorXd rhs(hess.rows());
        for (std::size_t v = 0; v < nv; ++v)
          for (Eigen::Index i = 0; i < dim; ++i)
            rhs[static_cast<Eigen::Index>(v) * dim + i] = lorentz_dot(tau[v], frame[v][static_cast<std::size_t>(i)]);
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(hess);
        Eigen::VectorXd sol = solver.info() == Eigen::Success ? Eigen::VectorXd(solver.solve(rhs)) : Eigen::VectorXd();
        const bool usable = solver.info() == Eigen::Success && sol.allFinite() && sol.dot(rhs) > 0.0;
        for (std::size_t v = 0; v < nv; ++v) {
          dir[v] = HTangent::Zero();
          if (!usable) {
            dir[v] = tau[v] / weight[v];
            continue;
          }
          for (Eigen::Index i = 0; i < dim; ++i)
            dir[v] += sol[static_cast<Eigen::Index>(v) * dim + i] * frame[v][static_cast<std::size_t>(i)];
        }
        step = 1.0;
      } else {
        for (std::size_t v = 0; v < nv; ++v) dir[v] = tau[v] / weight[v];
      }
      double slope = 0.0;
      for (std::size_t v = 0; v < nv; ++v) slope += lorentz_dot(tau[v], dir[v]);
      bool accepted = false;
      for (int halving = 0; halving < 60; ++halving) {
        std::vector<HPoint> trial(nv);
        for (std::size_t v = 0; v < nv; ++v) trial[v] = exp_map(f.values[v], step * dir[v]);
        const double et = energy(mesh, action, trial);
        bool ok = et <= e - options.armijo * step * slope;
        if (!ok && options.armijo * step * slope < noise * std::abs(e) && et <= e + noise * std::abs(e)) {
          // The decrease is below the rounding level of E: fall back to
          // requiring a smaller tension.
          auto trial_tau = tension(mesh, action, inverse, trial);
          ok = sup_norm(trial_tau) < sup;
        }
        if (ok) {
          f.values = std::move(trial);
          e = et;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        report.diagnosis = "line search stalled";
        break;
      }
      if (options.schedule == Schedule::jacobi) step = std::min(2.0 * step, 4.0);
    } else {
      for (std::size_t v = 0; v < nv; ++v) {
        HTangent g = HTangent::Zero();
        for (const auto& [fi, k] : incident[v]) {
          const auto& t = mesh.faces()[fi];
          const double w = 2.0 * mesh.edge_weight(fi, k);
          const Corner& a = t[static_cast<std::size_t>((k + 1) % 3)];
          const Corner& b = t[static_cast<std::size_t>((k + 2) % 3)];
          const HPoint pa = action[static_cast<std::size_t>(a.deck)] * f.values[static_cast<std::size_t>(a.vertex)];
          const HPoint pb = action[static_cast<std::size_t>(b.deck)] * f.values[static_cast<std::size_t>(b.vertex)];
          if (static_cast<std::size_t>(a.vertex) == v) g += w * log_map(f.values[v], inverse[static_cast<std::size_t>(a.deck)] * pb);
          if (static_cast<std::size_t>(b.vertex) == v) g += w * log_map(f.values[v], inverse[static_cast<std::size_t>(b.deck)] * pa);
        }
        const HTangent dir = g / weight[v];
        const double slope = lorentz_dot(g, dir);
        if (slope <= 0.0) continue;
        const double before = local_energy(v, f.values);
        const HPoint keep = f.values[v];
        double s = 1.0;
        for (int halving = 0; halving < 40; ++halving) {
          f.values[v] = exp_map(keep, s * dir);
          const double after = local_energy(v, f.values);
          if (after <= before - options.armijo * s * slope) break;
          if (options.armijo * s * slope < noise * before && after <= before + noise * before) break;
          f.values[v] = keep;
          s *= 0.5;
        }
      }
      e = energy(mesh, action, f.values);
    }
    tau = tension(mesh, action, inverse, f.values);
    sup = sup_norm(tau);
    report.trace.push_back({it, e, sup});
    double drift = 0.0;
    for (std::size_t v = 0; v < nv; ++v) drift = std::max(drift, distance(start[v], f.values[v]));
    if (drift > options.drift_limit) {
      report.diagnosis = "suspected elementary or boundary-escaping representation";
      break;
    }
  }
  report.iterations = it;
  report.energy = e;
  report.sup_tension = sup;
  report.converged = sup <= report.tolerance;
  if (!report.converged && report.diagnosis.empty()) report.diagnosis = "iteration limit reached";
  report.binding_residual = binding_residual(mesh, f);
  return report;
}

HarmonicOneForm harmonic_one_form(const FundamentalDomainMesh& mesh, const std::vector<double>& periods) {
  if (static_cast<int>(periods.size()) != 2 * mesh.genus()) throw std::invalid_argument("one period per generator required");
  HarmonicOneForm out;
  RealValuedMap& h = out.primitive;
  h.periods = periods;
  for (const Word& w : mesh.decks()) h.deck_shift.push_back(deck_shift(w, periods));

  // Minimise sum w (h_b + s_b - h_a - s_a)^2 over vertex values h.
  const auto nv = static_cast<Eigen::Index>(mesh.vertex_count());
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nv);
  for (std::size_t f = 0; f < mesh.face_count(); ++f)
    for (int k = 0; k < 3; ++k) {
      const auto& t = mesh.faces()[f];
      const Corner& a = t[static_cast<std::size_t>((k + 1) % 3)];
      const Corner& b = t[static_cast<std::size_t>((k + 2) % 3)];
      const double w = 2.0 * mesh.edge_weight(f, k);
      const double delta = h.deck_shift[static_cast<std::size_t>(b.deck)] - h.deck_shift[static_cast<std::size_t>(a.deck)];
      trip.emplace_back(a.vertex, a.vertex, w);
      trip.emplace_back(b.vertex, b.vertex, w);
      trip.emplace_back(a.vertex, b.vertex, -w);
      trip.emplace_back(b.vertex, a.vertex, -w);
      rhs[a.vertex] += w * delta;
      rhs[b.vertex] -= w * delta;
    }
  Eigen::SparseMatrix<double> k(nv, nv);
  k.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseMatrix<double> pinned = k;
  pinned.coeffRef(0, 0) += 1.0;  // rows of k sum to zero, so this fixes h(0) = 0 without bias
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(pinned);
  if (solver.info() != Eigen::Success) throw std::runtime_error("harmonic one-form: factorization failed");
  h.values = solver.solve(rhs);
  if (solver.info() != Eigen::Success) throw std::runtime_error("harmonic one-form: solve failed");
  const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
  out.divergence_residual = (k * h.values - rhs).cwiseAbs().maxCoeff() / scale;

  out.edge_values.resize(mesh.face_count());
  for (std::size_t f = 0; f < mesh.face_count(); ++f)
    for (int kk = 0; kk < 3; ++kk) {
      const auto& t = mesh.faces()[f];
      const Corner& a = t[static_cast<std::size_t>((kk + 1) % 3)];
      const Corner& b = t[static_cast<std::size_t>((kk + 2) % 3)];
      out.edge_values[f][static_cast<std::size_t>(kk)] = h.values[b.vertex] + h.deck_shift[static_cast<std::size_t>(b.deck)] -
                                                          h.values[a.vertex] - h.deck_shift[static_cast<std::size_t>(a.deck)];
    }

  auto value = [&](int p) {
    return h.values[mesh.rep(p)] + h.deck_shift[static_cast<std::size_t>(mesh.deck(p))];
  };
  for (const auto& pr : mesh.pairings()) {
    const double m = deck_shift(pr.word, periods);
    for (std::size_t i = 0; i < pr.from_chain.size(); ++i)
      out.period_residual = std::max(out.period_residual, std::abs(value(pr.to_chain[i]) - value(pr.from_chain[i]) - m));
  }
  return out;
}

}  // namespace fdom
