#include <stdexcept>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include "fdom/mesh.hpp"

using namespace fdom;

TEST_CASE("regular octagon domain") {
  const FundamentalDomainMesh m = build_regular_domain(2, 2);
  CHECK(m.face_count() == 8 * 16);
  CHECK(m.total_area() == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-12));
  CHECK(m.base_holonomy().relator_residual() <= 1e-8);
  for (double s : m.angle_sums()) CHECK(s == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-9));
  // |tr| = 2 + sqrt 2 for every side pairing (tests/oracles/oracles.py).
  for (const Mobius& g : m.base_holonomy().images) CHECK(std::abs(g.trace().real()) == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-12));
  CHECK(build_regular_domain(3, 1).total_area() == doctest::Approx(8.0 * std::numbers::pi).epsilon(1e-12));
  CHECK(build_regular_domain(2, 1).face_count() == 32);
}

TEST_CASE("refinement keeps the area") {
  const double a2 = build_regular_domain(2, 2).total_area(), a3 = build_regular_domain(2, 3).total_area();
  CHECK(std::abs(a3 - a2) / a2 < 1e-3);
}

TEST_CASE("twins and transitions are consistent") {
  const FundamentalDomainMesh m = build_regular_domain(2, 2);
  for (std::size_t f = 0; f < m.face_count(); ++f)
    for (int k = 0; k < 3; ++k) {
      const auto [g, kg] = m.twin(f, k);
      CHECK(m.twin(g, kg) == std::make_pair(f, k));
      CHECK(m.edge_length(f, k) == doctest::Approx(m.edge_length(g, kg)).epsilon(1e-12));
      // Inverse as group elements (the words may differ by the relator).
      CHECK(evaluate(m.base_holonomy(), m.transition(f, k) * m.transition(g, kg)).distance_to_identity() < 1e-7);
    }
}

TEST_CASE("cotangent laplacian") {
  const FundamentalDomainMesh m = build_regular_domain(2, 2);
  const Laplacian lap = laplacian(m);
  const auto n = static_cast<Eigen::Index>(m.vertex_count());
  CHECK(lap.apply(ScalarField::Ones(n)).cwiseAbs().maxCoeff() <= 1e-12);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  ScalarField u(n), v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    u[i] = g(rng);
    v[i] = g(rng);
  }
  const double uv = lap.mass.dot(lap.apply(u).cwiseProduct(v)), vu = lap.mass.dot(lap.apply(v).cwiseProduct(u));
  CHECK(uv == doctest::Approx(vu).epsilon(1e-10));
  CHECK(lap.mass.dot(lap.apply(u).cwiseProduct(u)) <= 0.0);
  CHECK(lap.mass.sum() == doctest::Approx(m.total_area()).epsilon(1e-12));
}

TEST_CASE("first laplace eigenvalue under refinement (monitored)") {
  for (int s = 1; s <= 3; ++s) {
    const FundamentalDomainMesh m = build_regular_domain(2, s);
    const Laplacian lap = laplacian(m);
    const Eigen::VectorXd is = lap.mass.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd a = -(is.asDiagonal() * Eigen::MatrixXd(lap.stiffness) * is.asDiagonal());
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues();
    CHECK(std::abs(ev[0]) < 1e-9);
    CHECK(ev[1] > 0.0);
    MESSAGE("subdivision " << s << ": lambda_1 = " << ev[1]);
  }
}

TEST_CASE("integrate") {
  const FundamentalDomainMesh m = build_regular_domain(2, 2);
  const auto n = static_cast<Eigen::Index>(m.vertex_count());
  CHECK(integrate(m, ScalarField::Ones(n)) == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-12));
  CHECK(integrate(m, ScalarField::Zero(n)) == 0.0);
  const ScalarField a = ScalarField::LinSpaced(n, 0.0, 1.0), b = ScalarField::LinSpaced(n, 2.0, -1.0);
  CHECK(integrate(m, 2.0 * a + b) == doctest::Approx(2.0 * integrate(m, a) + integrate(m, b)).epsilon(1e-12));
  CHECK(integrate_faces(m, FaceField::Ones(static_cast<Eigen::Index>(m.face_count()))) == doctest::Approx(m.total_area()));
}

TEST_CASE("fitted laplacian annihilates constants") {
  const FundamentalDomainMesh m = build_regular_domain(2, 2);
  const auto n = static_cast<Eigen::Index>(m.vertex_count());
  CHECK(fitted_laplacian(m, ScalarField::Constant(n, 3.0)).cwiseAbs().maxCoeff() < 1e-9);
  const Eigen::SparseMatrix<double> a = fitted_laplacian_matrix(m);
  const ScalarField x = ScalarField::LinSpaced(n, -1.0, 1.0);
  CHECK((a * x - fitted_laplacian(m, x)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("normal coordinates are isometric at the centre") {
  const HPoint x = from_disk({0.2, -0.3});
  const HPoint p = exp_map(x, 0.4 * tangent_basis(x)[0] + 0.3 * tangent_basis(x)[1]);
  const Eigen::Vector2d c = normal_coordinates(x, p);
  CHECK(c.x() == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(c.y() == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("mesh export") {
  std::ostringstream os;
  write_mesh(os, build_regular_domain(2, 1));
  CHECK(os.str().find("genus 2") != std::string::npos);
  CHECK(os.str().find("a1") != std::string::npos);
}
