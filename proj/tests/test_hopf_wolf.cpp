#include <stdexcept>
#include <cmath>
#include <complex>
#include <numbers>

#include <doctest.h>

#include "fdom/wolf.hpp"

using namespace fdom;

namespace {

FaceForms constant_forms(const FundamentalDomainMesh& m, double xx, double xy, double yy) {
  return FaceForms(m.face_count(), Eigen::Vector3d(xx, xy, yy));
}

}  // namespace

TEST_CASE("hopf differential of simple forms") {
  const FundamentalDomainMesh m = build_regular_domain(2, 1);
  for (const FaceFrame& fr : m.frames()) CHECK(fr.sigma == doctest::Approx(1.0));

  const HopfDifferential conformal = extract_hopf(m, constant_forms(m, 2.0, 0.0, 2.0));
  CHECK(conformal.phi.cwiseAbs().maxCoeff() == 0.0);

  const HopfDifferential stretch = extract_hopf(m, constant_forms(m, 4.0, 0.0, 1.0));
  CHECK(stretch.phi[0].real() == doctest::Approx(0.75));
  CHECK(stretch.phi[0].imag() == doctest::Approx(0.0));
  CHECK(stretch.norm_sq[0] == doctest::Approx(0.5625));

  const HopfDifferential shear = extract_hopf(m, constant_forms(m, 1.0, 0.5, 1.0));
  CHECK(shear.phi[0].real() == doctest::Approx(0.0));
  CHECK(shear.phi[0].imag() == doctest::Approx(-0.25));
}

TEST_CASE("H and L of a diagonal form") {
  const FundamentalDomainMesh m = build_regular_domain(2, 1);
  const PullbackDecomposition d = decompose(m, constant_forms(m, 4.0, 0.0, 1.0));
  // sqrt(a), sqrt(b) = 2, 1: H = 9/4, L = 1/4.
  CHECK(d.H[0] == doctest::Approx(2.25));
  CHECK(d.L[0] == doctest::Approx(0.25));
  CHECK(d.e[0] == doctest::Approx(2.5));
  for (Eigen::Index f = 0; f < d.e.size(); ++f) {
    CHECK(d.H[f] + d.L[f] == doctest::Approx(d.e[f]).epsilon(1e-14));
    CHECK(d.H[f] * d.L[f] == doctest::Approx(d.hopf.norm_sq[f]).epsilon(1e-14));
    CHECK_FALSE(d.degenerate[static_cast<std::size_t>(f)]);
  }
  const PullbackDecomposition c = decompose(m, constant_forms(m, 1.0, 0.0, 0.0));  // rank one: H = L
  CHECK(c.degenerate[0]);
}

TEST_CASE("hl decomposition") {
  FaceField e(3), q(3);
  e << 2.0, 3.0, 1.0;
  q << 1.0, 2.0, 0.0;
  const HL hl = hl_decomposition(e, q);
  CHECK(hl.H[0] == doctest::Approx(1.0));
  CHECK(hl.L[0] == doctest::Approx(1.0));
  CHECK(hl.H[1] == doctest::Approx(2.0));
  CHECK(hl.L[1] == doctest::Approx(1.0));
  CHECK(hl.L[2] == 0.0);
  FaceField bad(1), bq(1);
  bad << 1.0;
  bq << 1.0;
  CHECK_THROWS_AS(hl_decomposition(bad, bq), std::domain_error);
}

TEST_CASE("assemble and extract are inverse") {
  const FundamentalDomainMesh m = build_regular_domain(2, 1);
  const auto n = static_cast<Eigen::Index>(m.face_count());
  FaceField alpha = FaceField::LinSpaced(n, 1.0, 2.0);
  ComplexFaceField phi(n);
  for (Eigen::Index f = 0; f < n; ++f) phi[f] = std::polar(0.3, 0.1 * static_cast<double>(f));
  const HopfDifferential h = extract_hopf(m, assemble_form(m, alpha, phi));
  CHECK((h.phi - phi).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("identity map has vanishing hopf differential") {
  const FundamentalDomainMesh m = build_regular_domain(2, 3);
  const EquivariantVertexMap id = identity_map(m, m.base_holonomy());
  const PullbackDecomposition d = decompose(m, pullback_components(m, id));
  CHECK(d.hopf.norm_sq.maxCoeff() < 1e-20);
  CHECK(d.e.minCoeff() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(holomorphicity_residual(m, d.hopf) < 1e-10);
}

TEST_CASE("wolf equation with constant data") {
  // Constant solutions of u^2 - u - q = 0 (tests/oracles/oracles.py).
  const FundamentalDomainMesh m = build_regular_domain(2, 2);
  const auto nv = static_cast<Eigen::Index>(m.vertex_count());
  const std::pair<double, double> cases[] = {
      {0.0, 1.0}, {0.25, 1.2071067811865475244}, {1.0, 1.6180339887498948482}};
  for (const auto& [q, root] : cases) {
    for (bool quad : {true, false}) {
      WolfOptions opt;
      opt.quadratic_root_start = quad;
      const WolfSolution s = solve_wolf_at_vertices(m, ScalarField::Constant(nv, q), opt);
      CHECK(s.converged);
      CHECK(s.residual <= 1e-10);
      CHECK(s.u.minCoeff() == doctest::Approx(root).epsilon(1e-9));
      CHECK(s.u.maxCoeff() == doctest::Approx(root).epsilon(1e-9));
    }
  }
  const WolfSolution f = solve_wolf(m, FaceField::Constant(static_cast<Eigen::Index>(m.face_count()), 1.0));
  CHECK(f.u.mean() == doctest::Approx(1.6180339887498948482).epsilon(1e-9));
  CHECK((f.H1.array() * f.L1.array() - 1.0).abs().maxCoeff() < 1e-9);
}

TEST_CASE("wolf metric") {
  const FundamentalDomainMesh m = build_regular_domain(2, 1);
  const auto nv = static_cast<Eigen::Index>(m.vertex_count());
  const WolfSolution s = solve_wolf_at_vertices(m, ScalarField::Zero(nv));
  HopfDifferential h{ComplexFaceField::Zero(static_cast<Eigen::Index>(m.face_count())),
                     FaceField::Zero(static_cast<Eigen::Index>(m.face_count()))};
  const FaceForms g = wolf_metric(m, s, h);
  CHECK(g[0].x() == doctest::Approx(1.0));
  CHECK(g[0].y() == doctest::Approx(0.0));
  CHECK(g[0].z() == doctest::Approx(1.0));
  CHECK(wolf_residual(m, ScalarField::Zero(nv), ScalarField::Zero(nv)) < 1e-12);
}

TEST_CASE("curvature of the base metric") {
  const FundamentalDomainMesh m = build_regular_domain(2, 3);
  const CurvatureReport c = discrete_curvature(m, constant_forms(m, 1.0, 0.0, 1.0));
  CHECK(c.coverage == 1.0);
  // Euclidean angle defects sum to 2 pi chi for any closed triangulation.
  CHECK(c.total == doctest::Approx(-4.0 * std::numbers::pi).epsilon(1e-9));
  CHECK(c.kappa.mean() == doctest::Approx(-1.0).epsilon(0.05));
}
