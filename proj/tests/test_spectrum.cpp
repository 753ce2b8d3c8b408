#include <stdexcept>
#include <cmath>

#include <doctest.h>

#include "fdom/mesh.hpp"
#include "fdom/spectrum.hpp"

using namespace fdom;

TEST_CASE("length spectrum basics") {
  const FundamentalDomainMesh m = build_regular_domain(2, 1);
  const Representation j0 = m.base_holonomy();
  // tests/oracles/oracles.py
  const double t = 2.2567679299326021766;
  for (int n = 1; n <= 4; ++n) {
    Word w;
    for (int k = 0; k < n; ++k) w = w * Word::generator(0);
    CHECK(length_spectrum(j0, {w})[0] == doctest::Approx(n * t).epsilon(1e-10));
  }
  const auto words = enumerate_conjugacy_words(j0.presentation, 3);
  const auto zero = length_spectrum(trivial_representation(2), words);
  for (double l : zero) CHECK(l == 0.0);
  const auto a = length_spectrum(j0, words);
  const auto b = length_spectrum(conjugate(j0, Mobius::real(2.0, 1.0, 3.0, 2.0)), words);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-10));
}

TEST_CASE("domination table") {
  const Representation j0 = build_regular_domain(2, 1).base_holonomy();
  const SpectrumTable self = verify_spectrum_domination(j0, j0, 1.0, 4);
  CHECK(self.violations.empty());
  CHECK(self.max_ratio == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(self.rows.size() == 390);
  const SpectrumTable strict = verify_spectrum_domination(j0, j0, 0.9, 2);
  CHECK(strict.violations.size() == strict.rows.size());
  const SpectrumTable triv = verify_spectrum_domination(j0, trivial_representation(2), 0.0, 3);
  CHECK(triv.violations.empty());
  CHECK(triv.max_ratio == 0.0);
}

TEST_CASE("critical exponent estimate") {
  const Representation j0 = build_regular_domain(2, 1).base_holonomy();
  const CriticalExponent c = critical_exponent_estimate(j0, 12.0);
  MESSAGE("delta at R = 12: " << c.delta << " from " << c.count << " points");
  CHECK(c.delta > 0.8);
  CHECK(c.delta <= 1.0);
  CHECK_THROWS_AS(critical_exponent_estimate(trivial_representation(2), 12.0), std::invalid_argument);
  CHECK_THROWS_AS(critical_exponent_estimate(j0, 0.5), std::runtime_error);
}
