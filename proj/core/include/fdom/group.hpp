#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fdom {

/// One letter of a word in the free group on a_1, b_1, ..., a_g, b_g.
/// Generator index 2k is a_{k+1}, 2k+1 is b_{k+1}.
struct Letter {
  int gen = 0;
  int exp = 1;  // +1 or -1

  Letter inverse() const { return {gen, -exp}; }
  bool cancels(const Letter& other) const { return gen == other.gen && exp == -other.exp; }
  // Total order used for canonical conjugacy representatives.
  int code() const { return 2 * gen + (exp < 0 ? 1 : 0); }

  friend bool operator==(const Letter&, const Letter&) = default;
};

class Word {
public:
  Word() = default;
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}

  static Word generator(int gen, int exp = 1) { return Word({Letter{gen, exp}}); }

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  const Letter& operator[](std::size_t i) const { return letters_[i]; }

  Word inverse() const;
  Word operator*(const Word& rhs) const;  // concatenation followed by free reduction

  bool is_reduced() const;
  bool is_cyclically_reduced() const;

  /// Rendered as e.g. "a1 b1 A1 B1" (capital = inverse). Empty word is "1".
  std::string to_string() const;
  static Word parse(std::string_view text);

  friend bool operator==(const Word&, const Word&) = default;

private:
  std::vector<Letter> letters_;
};

/// Free reduction. Idempotent and length non-increasing.
Word reduce(const Word& word);

/// Cyclic reduction (strips cancelling first/last pairs after free reduction).
Word cyclically_reduce(const Word& word);

/// Standard presentation < a_1, b_1, ..., a_g, b_g | prod [a_i, b_i] >.
class SurfaceGroupPresentation {
public:
  explicit SurfaceGroupPresentation(int genus);

  int genus() const { return genus_; }
  int generator_count() const { return 2 * genus_; }
  const Word& relator() const { return relator_; }
  std::string generator_name(int gen) const;

private:
  int genus_;
  Word relator_;
};

/// prod_{i=1..g} a_i b_i a_i^-1 b_i^-1. Throws std::invalid_argument when g < 2.
Word relator(int genus);

/// Canonical representative of the class of `word` under cyclic rotation and
/// inversion: the lexicographically smallest rotation of w or w^-1.
/// Precondition: word is cyclically reduced.
Word canonical_cyclic_representative(const Word& word);

/// One cyclically reduced representative per rotation/inversion class of freely
/// reduced words of length 1..maxLen, ordered by length then lexicographically.
/// This is free-group dedup only; surface-group conjugacy is not resolved.
std::vector<Word> enumerate_conjugacy_words(const SurfaceGroupPresentation& presentation, int max_len);

}  // namespace fdom
