#include <stdexcept>
#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "fdom/harmonic.hpp"

using namespace fdom;

namespace {

// Central difference of E along a tangent direction at one vertex.
double directional_derivative(const FundamentalDomainMesh& m, const EquivariantVertexMap& f, int v, const HTangent& t,
                              double h) {
  EquivariantVertexMap p = f, q = f;
  p.values[static_cast<std::size_t>(v)] = exp_map(f.values[static_cast<std::size_t>(v)], h * t);
  q.values[static_cast<std::size_t>(v)] = exp_map(f.values[static_cast<std::size_t>(v)], -h * t);
  return (total_energy(m, p) - total_energy(m, q)) / (2.0 * h);
}

}  // namespace

TEST_CASE("energy of the identity and constant maps") {
  const FundamentalDomainMesh m = build_regular_domain(2, 3);
  const EquivariantVertexMap id = identity_map(m, m.base_holonomy());
  const FaceField e = energy_density(m, id);
  CHECK(e.minCoeff() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(e.maxCoeff() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(total_energy(m, id) == doctest::Approx(4.0 * std::numbers::pi).epsilon(0.01));
  const EquivariantVertexMap c = orbit_map(m, trivial_representation(2));
  CHECK(total_energy(m, c) == 0.0);
  for (const HTangent& t : discrete_tension(m, c)) CHECK(tangent_norm(t) == 0.0);
}

TEST_CASE("energy is invariant under target isometries") {
  const FundamentalDomainMesh m = build_regular_domain(2, 2);
  const Representation j0 = m.base_holonomy();
  EquivariantVertexMap f = random_map(m, j0, 9, 0.5);
  const Mobius g = Mobius::real(2.0, 1.0, 3.0, 2.0);
  EquivariantVertexMap gf{conjugate(j0, g), {}};
  for (const HPoint& x : f.values) gf.values.push_back(g.apply(x));
  CHECK(total_energy(m, gf) == doctest::Approx(total_energy(m, f)).epsilon(1e-10));
  CHECK(total_energy(m, f) >= 0.0);
}

TEST_CASE("tension is the negative energy gradient") {
  const FundamentalDomainMesh m = build_regular_domain(2, 2);
  const EquivariantVertexMap f = random_map(m, m.base_holonomy(), 4, 0.8);
  const auto tau = discrete_tension(m, f);
  std::mt19937_64 rng(21);
  for (int s = 0; s < 10; ++s) {
    const int v = static_cast<int>(rng() % m.vertex_count());
    const auto basis = tangent_basis(f.values[static_cast<std::size_t>(v)]);
    for (const HTangent& t : basis) {
      const double fd = directional_derivative(m, f, v, t, 1e-5);
      const double an = -lorentz_dot(tau[static_cast<std::size_t>(v)], t);
      CHECK(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)));
    }
  }
}

TEST_CASE("identity is nearly harmonic and the flow finds the harmonic map") {
  const FundamentalDomainMesh m = build_regular_domain(2, 3);
  const Representation j0 = m.base_holonomy();
  const EquivariantVertexMap id = identity_map(m, j0);
  double sup = 0.0;
  for (const HTangent& t : discrete_tension(m, id)) sup = std::max(sup, tangent_norm(t));
  MESSAGE("identity sup tension at subdivision 3: " << sup);
  CHECK(sup < 0.05 * m.mean_edge_weight());

  for (Schedule s : {Schedule::newton, Schedule::gauss_seidel}) {
    EquivariantVertexMap f = random_map(m, j0, 2, 0.3);
    FlowOptions opt;
    opt.schedule = s;
    if (s != Schedule::newton) opt.tol = 1e-6 * m.mean_edge_weight();
    const FlowReport rep = harmonic_flow(m, f, opt);
    CHECK(rep.converged);
    CHECK(rep.energy == doctest::Approx(4.0 * std::numbers::pi).epsilon(0.01));
    CHECK(rep.binding_residual < 1e-10);
  }
}

TEST_CASE("harmonic one-form with prescribed periods") {
  const FundamentalDomainMesh m = build_regular_domain(2, 2);
  const HarmonicOneForm h = harmonic_one_form(m, {0.3, -0.7, 1.1, 0.2});
  CHECK(h.divergence_residual < 1e-10);
  CHECK(h.period_residual < 1e-10);
  const HarmonicOneForm z = harmonic_one_form(m, {0.0, 0.0, 0.0, 0.0});
  CHECK(z.primitive.values.cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(harmonic_one_form(m, {1.0}), std::invalid_argument);
}
