#pragma once

#include <optional>
#include <vector>

#include "fdom/group.hpp"
#include "fdom/isometry.hpp"

namespace fdom {

/// Translation lengths l(rho(w)) for each word.
std::vector<double> length_spectrum(const Representation& rho, const std::vector<Word>& words);

struct SpectrumRow {
  Word word;
  double l_rho = 0.0;
  double l_j = 0.0;
  std::optional<double> ratio;  // l_rho / l_j when l_j > tol
};

struct SpectrumTable {
  std::vector<SpectrumRow> rows;
  int max_word_length = 0;
  std::vector<std::size_t> violations;  // row indices with l_rho > lambda l_j + tol
  double max_ratio = 0.0;
};

/// Rows for every word of enumerate_conjugacy_words(max_len), checked against
/// l_rho <= lambda l_j + tol.
SpectrumTable verify_spectrum_domination(const Representation& j, const Representation& rho, double lambda, int max_len,
                                         double tol = 1e-9);

struct CriticalExponent {
  double delta = 0.0;  // log N(R) / R
  double radius = 0.0;
  long count = 0;      // distinct orbit points within radius
  int word_cap = 0;    // longest word expanded
  double slack = 0.0;  // expansion continues through points within radius + slack
};

/// Coarse orbit count N(R) = #{rho(w) x : d(x, rho(w) x) <= R} by breadth-first
/// expansion over generators, deduplicating orbit points. Words are expanded
/// while their point lies within R + slack, slack being the largest generator
/// displacement of x. A heuristic: the quotient converges slowly in R.
/// Throws std::invalid_argument for elementary rho and std::runtime_error
/// ("increase R") when N < 10.
CriticalExponent critical_exponent_estimate(const Representation& rho, double radius, const HPoint& basepoint = origin(),
                                            int max_word_len = 64);

}  // namespace fdom
