#include <stdexcept>
#include <cmath>
#include <random>

#include <doctest.h>

#include "fdom/isometry.hpp"
#include "fdom/mesh.hpp"

using namespace fdom;

namespace {

Mobius random_real(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  for (;;) {
    const double a = n(rng), b = n(rng), c = n(rng), d = n(rng);
    if (std::abs(a * d - b * c) > 0.1) return a * d - b * c > 0 ? Mobius::real(a, b, c, d) : Mobius::real(b, a, d, c);
  }
}

Word random_word(std::mt19937_64& rng, int gens, int len) {
  std::vector<Letter> l;
  for (int i = 0; i < len; ++i) l.push_back({static_cast<int>(rng() % gens), rng() % 2 ? 1 : -1});
  return reduce(Word(l));
}

}  // namespace

TEST_CASE("evaluate") {
  const Representation j0 = build_regular_domain(2, 1).base_holonomy();
  CHECK(evaluate(j0, Word()).distance_to_identity() < 1e-15);
  CHECK(evaluate(j0, Word::parse("a1 A1")).distance_to_identity() < 1e-15);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const Word w = random_word(rng, 4, 7);
    CHECK((evaluate(j0, w) * evaluate(j0, w.inverse())).distance_to_identity() < 1e-7);
  }
}

TEST_CASE("distance") {
  const HPoint i = from_upper_half_plane({0.0, 1.0});
  CHECK(distance(i, i) == doctest::Approx(0.0));
  CHECK(distance(i, from_upper_half_plane({0.0, std::exp(2.0)})) == doctest::Approx(2.0).epsilon(1e-14));
  const HPoint p = from_upper_half_plane({0.3, 0.2}), q = from_upper_half_plane({-1.0, 3.0});
  CHECK(distance(p, q) == doctest::Approx(distance(q, p)).epsilon(1e-14));
  CHECK_THROWS_AS(from_upper_half_plane({0.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(from_disk({1.0, 0.0}), std::domain_error);
}

TEST_CASE("translation length") {
  CHECK(translation_length(Mobius()) == 0.0);
  CHECK(translation_length(Mobius::diagonal(std::exp(1.0))) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(translation_length(Mobius::real(1, 1, 0, 1)) == 0.0);
  std::mt19937_64 rng(7);
  const Mobius phi = Mobius::real(3.0, 1.0, 2.0, 1.0);
  const double l = translation_length(phi);
  for (int t = 0; t < 20; ++t) {
    const Mobius g = random_real(rng);
    CHECK(std::abs(translation_length(g * phi * g.inverse()) - l) <= 1e-10);
  }
  Mobius p = phi;
  for (int n = 2; n <= 5; ++n) {
    p = p * phi;
    CHECK(translation_length(p) == doctest::Approx(n * l).epsilon(1e-10));
  }
  // Loxodromic in H3: real part of the complex length.
  CHECK(translation_length(Mobius::diagonal(std::polar(std::exp(0.7), 0.4))) == doctest::Approx(1.4).epsilon(1e-12));
}

TEST_CASE("busemann function and cocycle") {
  const BusemannRay ray;
  CHECK(ray(from_upper_half_plane({0.4, 2.5})) == doctest::Approx(-std::log(2.5)).epsilon(1e-12));
  CHECK(ray(ray.point_at(1.7)) == doctest::Approx(-1.7).epsilon(1e-12));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int t = 0; t < 30; ++t) {
    const HPoint x = from_upper_half_plane({u(rng), std::exp(u(rng))}), y = from_upper_half_plane({u(rng), std::exp(u(rng))});
    CHECK(std::abs(ray(x) - ray(y)) <= distance(x, y) + 1e-12);
  }
  CHECK(busemann_cocycle(Mobius::diagonal(std::exp(1.0)), ray) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(busemann_cocycle(Mobius(), ray) == 0.0);
  CHECK(busemann_cocycle(Mobius::real(1, 1, 0, 1), ray) == doctest::Approx(0.0));
  CHECK_THROWS_AS(busemann_cocycle(Mobius::real(1, 0, 1, 1), ray), std::invalid_argument);
  const Mobius a = Mobius::real(2.0, 1.0, 0.0, 0.5), b = Mobius::real(0.5, -3.0, 0.0, 2.0);
  CHECK(busemann_cocycle(a * b, ray) == doctest::Approx(busemann_cocycle(a, ray) + busemann_cocycle(b, ray)).epsilon(1e-10));
  CHECK(std::abs(busemann_cocycle(a, ray)) == doctest::Approx(translation_length(a)).epsilon(1e-10));
}

TEST_CASE("boundary orbit analysis") {
  Representation axis = trivial_representation(2);
  for (int k = 0; k < 4; ++k) axis.images[static_cast<std::size_t>(k)] = Mobius::diagonal(std::exp(0.2 * (k + 1)));
  const auto rep = boundary_orbit_analysis(axis);
  CHECK(rep.kind == BoundaryOrbitKind::fixed_pair);
  REQUIRE(rep.points.size() == 2);
  CHECK(boundary_orbit_analysis(trivial_representation(2)).trivial);
  CHECK(boundary_orbit_analysis(build_regular_domain(2, 1).base_holonomy()).kind == BoundaryOrbitKind::nonelementary);
}

TEST_CASE("euler class") {
  CHECK(euler_class(trivial_representation(2)) == 0);
  const Representation j0 = build_regular_domain(2, 1).base_holonomy();
  CHECK(std::abs(euler_class(j0)) == 2);
  Representation swap = j0;
  swap.images = {j0.images[0], j0.images[1], j0.images[1], j0.images[0]};
  CHECK(euler_class(swap) == 0);
  CHECK(euler_class(conjugate(j0, Mobius::real(2.0, 1.0, 1.0, 1.0))) == euler_class(j0));
  Representation h3 = j0;
  h3.target = Target::H3;
  CHECK_THROWS_AS(euler_class(h3), std::invalid_argument);
}

TEST_CASE("translation length stays accurate near the identity") {
  for (double l : {1e-9, 1e-6, 1e-3}) {
    const Mobius g = Mobius::diagonal(std::exp(l / 2.0));
    CHECK(translation_length(g) == doctest::Approx(l).epsilon(1e-12));
    const Mobius c = Mobius::real(2.0, 1.0, 3.0, 2.0);
    CHECK(translation_length(c * g * c.inverse()) == doctest::Approx(l).epsilon(1e-6));
  }
  CHECK(translation_length(Mobius::real(1.0, 1.0, 0.0, 1.0)) == 0.0);
  CHECK(translation_length(Mobius::real(std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3))) == 0.0);
}
