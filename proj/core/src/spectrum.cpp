#include "fdom/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <stdexcept>

namespace fdom {

std::vector<double> length_spectrum(const Representation& rho, const std::vector<Word>& words) {
  std::vector<double> out;
  out.reserve(words.size());
  for (const Word& w : words) out.push_back(translation_length(evaluate(rho, w)));
  return out;
}

SpectrumTable verify_spectrum_domination(const Representation& j, const Representation& rho, double lambda, int max_len,
                                         double tol) {
  if (j.genus() != rho.genus()) throw std::invalid_argument("genus mismatch");
  SpectrumTable t;
  t.max_word_length = max_len;
  const auto words = enumerate_conjugacy_words(rho.presentation, max_len);
  const auto lr = length_spectrum(rho, words);
  const auto lj = length_spectrum(j, words);
  t.rows.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    SpectrumRow r{words[i], lr[i], lj[i], std::nullopt};
    if (lj[i] > tol) {
      r.ratio = lr[i] / lj[i];
      t.max_ratio = std::max(t.max_ratio, *r.ratio);
    }
    if (lr[i] > lambda * lj[i] + tol) t.violations.push_back(i);
    t.rows.push_back(std::move(r));
  }
  return t;
}

CriticalExponent critical_exponent_estimate(const Representation& rho, double radius, const HPoint& basepoint,
                                            int max_word_len) {
  const auto orbit = boundary_orbit_analysis(rho);
  if (orbit.trivial || orbit.kind != BoundaryOrbitKind::nonelementary)
    throw std::invalid_argument("critical exponent needs a nonelementary representation");
  std::vector<Mobius> gens;
  for (const Mobius& g : rho.images) {
    gens.push_back(g);
    gens.push_back(g.inverse());
  }
  // Work with N = F^-1 h F, F taking the standard origin to the basepoint:
  // N N^* is the hermitian form of the orbit point, cosh d = |N|_F^2 / 2.
  // This avoids renormalizing far points, which loses all precision.
  const auto hs = to_upper_half_space(basepoint);
  const double sh = std::sqrt(hs.h);
  Mat2c fm;
  fm << sh, hs.w / sh, 0.0, 1.0 / sh;
  const Mobius frame(fm), frame_inv = frame.inverse();
  for (Mobius& g : gens) g = frame_inv * g * frame;
  auto dist = [](const Mobius& n) { return std::acosh(std::max(1.0, 0.5 * n.matrix().squaredNorm())); };
  // Orbit points are keyed by their Klein-model coordinates on a fine grid.
  auto key = [](const Mobius& n) {
    const Mat2c h = n.matrix() * n.matrix().adjoint();
    const double t = 0.5 * (h(0, 0).real() + h(1, 1).real());
    const double s = 1e9 / t;
    return std::array<long long, 3>{std::llround(h(0, 1).real() * s), std::llround(h(0, 1).imag() * s),
                                    std::llround(0.5 * (h(0, 0).real() - h(1, 1).real()) * s)};
  };
  CriticalExponent ce;
  ce.radius = radius;
  for (const Mobius& g : gens) ce.slack = std::max(ce.slack, dist(g));

  std::set<std::array<long long, 3>> seen{key(Mobius())};
  std::vector<Mobius> front{Mobius()};
  ce.count = 1;
  for (int len = 1; len <= max_word_len && !front.empty(); ++len) {
    std::vector<Mobius> next;
    for (const Mobius& m : front)
      for (const Mobius& g : gens) {
        const Mobius h = m * g;
        const double d = dist(h);
        if (d > radius + ce.slack) continue;
        if (!seen.insert(key(h)).second) continue;
        if (d <= radius) ++ce.count;
        next.push_back(h);
      }
    if (!next.empty()) ce.word_cap = len;
    front = std::move(next);
  }
  if (ce.count < 10) throw std::runtime_error("orbit too sparse: increase R");
  ce.delta = std::log(static_cast<double>(ce.count)) / radius;
  return ce;
}

}  // namespace fdom
