#include <stdexcept>
#include <cmath>
#include <numbers>

#include <doctest.h>

#include "fdom/holonomy.hpp"
#include "fdom/spectrum.hpp"

using namespace fdom;

namespace {

FaceForms unit_forms(const FundamentalDomainMesh& m) { return FaceForms(m.face_count(), Eigen::Vector3d(1.0, 0.0, 1.0)); }

}  // namespace

TEST_CASE("hyperbolic law of cosines") {
  const double a = 1.3;
  const double expect = std::acos(std::cosh(a) / (std::cosh(a) + 1.0));
  CHECK(hyperbolic_law_of_cosines(a, a, a) == doctest::Approx(expect).epsilon(1e-14));
  // Small triangles are nearly Euclidean: 3-4-5 right angle.
  CHECK(hyperbolic_law_of_cosines(3e-4, 4e-4, 5e-4) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-6));
  CHECK_THROWS_AS(hyperbolic_law_of_cosines(1.0, 1.0, 2.5), std::domain_error);
}

TEST_CASE("edge lengths of the base metric") {
  const FundamentalDomainMesh m = build_regular_domain(2, 2);
  const EdgeLengthTable t = edge_lengths(m, unit_forms(m));
  CHECK(t.mismatch_rms < 1e-12);
  double worst = 0.0;
  for (std::size_t f = 0; f < m.face_count(); ++f)
    for (int k = 0; k < 3; ++k)
      worst = std::max(worst, std::abs(t.averaged[f][static_cast<std::size_t>(k)] - m.edge_length(f, k)) / m.edge_length(f, k));
  CHECK(worst < 1e-12);
  const EdgeLengthTable s = edge_lengths(m, FaceForms(m.face_count(), Eigen::Vector3d(4.0, 0.0, 4.0)));
  CHECK(s.averaged[0][0] == doctest::Approx(2.0 * t.averaged[0][0]));
}

TEST_CASE("developing the base metric recovers the base holonomy") {
  const FundamentalDomainMesh m = build_regular_domain(2, 2);
  const EdgeLengthTable t = edge_lengths(m, unit_forms(m));
  const DevelopedStructure d = develop(m, t.averaged);
  CHECK(d.relator_residual < 1e-8);
  for (const Mobius& g : d.j.images) CHECK(std::abs(g.trace().real()) == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-9));
  for (const Word& w : enumerate_conjugacy_words(d.j.presentation, 4)) {
    const double a = std::abs(evaluate(d.j, w).trace().real());
    const double b = std::abs(evaluate(m.base_holonomy(), w).trace().real());
    CHECK(a > 2.0);
    CHECK(a == doctest::Approx(b).epsilon(1e-8));
  }
  const DevelopedStructure other = develop(m, t.averaged, m.face_count() / 2);
  for (std::size_t i = 0; i < d.j.images.size(); ++i)
    CHECK(std::abs(other.j.images[i].trace().real()) == doctest::Approx(std::abs(d.j.images[i].trace().real())).epsilon(1e-9));
}

TEST_CASE("uniformization leaves a hyperbolic metric alone and repairs a perturbed one") {
  const FundamentalDomainMesh m = build_regular_domain(2, 2);
  EdgeLengths base(m.face_count());
  for (std::size_t f = 0; f < m.face_count(); ++f)
    for (int k = 0; k < 3; ++k) base[f][static_cast<std::size_t>(k)] = m.edge_length(f, k);
  const Uniformization u0 = uniformize_lengths(m, base);
  CHECK(u0.converged);
  CHECK(u0.initial_defect < 1e-9);
  CHECK(u0.u.cwiseAbs().maxCoeff() < 1e-9);

  EdgeLengths bumped = base;
  for (std::size_t f = 0; f < m.face_count(); ++f)
    for (int k = 0; k < 3; ++k) {
      const auto [g, kg] = m.twin(f, k);
      const double s = 1.0 + 0.02 * std::sin(static_cast<double>(std::min(f, g) * 3 + 1));
      bumped[f][static_cast<std::size_t>(k)] *= s;
    }
  const Uniformization u1 = uniformize_lengths(m, bumped);
  CHECK(u1.initial_defect > 1e-3);
  CHECK(u1.converged);
  CHECK(u1.max_angle_defect < 1e-10);
  const DevelopedStructure d = develop(m, u1.lengths);
  CHECK(d.relator_residual < 1e-8);
}

TEST_CASE("fit_isometry recovers an isometry") {
  const Mobius g = Mobius::real(2.0, 1.0, 3.0, 2.0);
  std::vector<HPoint> from{origin(), from_disk({0.3, 0.1}), from_disk({-0.2, 0.4})}, to;
  for (const HPoint& x : from) to.push_back(g.apply(x));
  const Mobius h = fit_isometry(from, to);
  for (const HPoint& x : from) CHECK(distance(h.apply(x), g.apply(x)) < 1e-10);
}
