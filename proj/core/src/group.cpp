#include "fdom/group.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace fdom {

Word Word::inverse() const {
  std::vector<Letter> out;
  out.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) out.push_back(it->inverse());
  return Word(std::move(out));
}

Word Word::operator*(const Word& rhs) const {
  std::vector<Letter> out = letters_;
  out.insert(out.end(), rhs.letters_.begin(), rhs.letters_.end());
  return reduce(Word(std::move(out)));
}

bool Word::is_reduced() const {
  for (std::size_t i = 1; i < letters_.size(); ++i)
    if (letters_[i].cancels(letters_[i - 1])) return false;
  return true;
}

bool Word::is_cyclically_reduced() const {
  if (!is_reduced()) return false;
  return letters_.size() < 2 || !letters_.front().cancels(letters_.back());
}

std::string Word::to_string() const {
  if (letters_.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i) out += ' ';
    const Letter& l = letters_[i];
    char base = (l.gen % 2 == 0) ? 'a' : 'b';
    if (l.exp < 0) base = static_cast<char>(std::toupper(base));
    out += base;
    out += std::to_string(l.gen / 2 + 1);
  }
  return out;
}

Word Word::parse(std::string_view text) {
  std::vector<Letter> out;
  if (text == "1") return Word();
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower != 'a' && lower != 'b') throw std::invalid_argument("bad word letter in '" + std::string(text) + "'");
    ++i;
    std::size_t j = i;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i) throw std::invalid_argument("missing generator index in '" + std::string(text) + "'");
    const int idx = std::stoi(std::string(text.substr(i, j - i)));
    if (idx < 1) throw std::invalid_argument("generator index must be >= 1");
    out.push_back({2 * (idx - 1) + (lower == 'b' ? 1 : 0), std::isupper(static_cast<unsigned char>(c)) ? -1 : 1});
    i = j;
  }
  return reduce(Word(std::move(out)));
}

Word reduce(const Word& word) {
  std::vector<Letter> stack;
  stack.reserve(word.size());
  for (const Letter& l : word.letters()) {
    if (!stack.empty() && stack.back().cancels(l))
      stack.pop_back();
    else
      stack.push_back(l);
  }
  return Word(std::move(stack));
}

Word cyclically_reduce(const Word& word) {
  const Word r = reduce(word);
  const auto& ls = r.letters();
  std::size_t lo = 0, hi = ls.size();
  while (hi - lo >= 2 && ls[lo].cancels(ls[hi - 1])) {
    ++lo;
    --hi;
  }
  return Word(std::vector<Letter>(ls.begin() + static_cast<long>(lo), ls.begin() + static_cast<long>(hi)));
}

Word relator(int genus) {
  if (genus < 2) throw std::invalid_argument("surface group genus must be >= 2");
  std::vector<Letter> ls;
  ls.reserve(static_cast<std::size_t>(4 * genus));
  for (int i = 0; i < genus; ++i) {
    const int a = 2 * i, b = 2 * i + 1;
    ls.push_back({a, 1});
    ls.push_back({b, 1});
    ls.push_back({a, -1});
    ls.push_back({b, -1});
  }
  return Word(std::move(ls));
}

SurfaceGroupPresentation::SurfaceGroupPresentation(int genus) : genus_(genus), relator_(fdom::relator(genus)) {}

std::string SurfaceGroupPresentation::generator_name(int gen) const {
  return std::string(gen % 2 == 0 ? "a" : "b") + std::to_string(gen / 2 + 1);
}

namespace {

// Letters as codes 0..4g-1; inverse flips the low bit.
inline int inv_code(int c) { return c ^ 1; }

// True when `codes` is lexicographically <= every rotation of itself and of
// its inverse word.
bool is_canonical(const std::vector<int>& codes) {
  const std::size_t n = codes.size();
  std::vector<int> inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[i] = inv_code(codes[n - 1 - i]);
  auto less_rot = [&](const std::vector<int>& w, std::size_t shift) {
    for (std::size_t i = 0; i < n; ++i) {
      const int a = w[(i + shift) % n];
      if (a != codes[i]) return a < codes[i];
    }
    return false;
  };
  for (std::size_t s = 1; s < n; ++s)
    if (less_rot(codes, s)) return false;
  for (std::size_t s = 0; s < n; ++s)
    if (less_rot(inv, s)) return false;
  return true;
}

Word from_codes(const std::vector<int>& codes) {
  std::vector<Letter> ls;
  ls.reserve(codes.size());
  for (int c : codes) ls.push_back({c / 2, (c & 1) ? -1 : 1});
  return Word(std::move(ls));
}

void extend(std::vector<int>& codes, int len, int alphabet, std::vector<Word>& out) {
  if (static_cast<int>(codes.size()) == len) {
    if (len >= 2 && codes.back() == inv_code(codes.front())) return;
    if (is_canonical(codes)) out.push_back(from_codes(codes));
    return;
  }
  const int first = codes.front();
  for (int c = first; c < alphabet; ++c) {
    if (inv_code(c) < first) continue;  // a rotation of the inverse would start lower
    if (codes.back() == inv_code(c)) continue;
    codes.push_back(c);
    extend(codes, len, alphabet, out);
    codes.pop_back();
  }
}

}  // namespace

Word canonical_cyclic_representative(const Word& word) {
  std::vector<int> codes;
  for (const Letter& l : word.letters()) codes.push_back(l.code());
  const std::size_t n = codes.size();
  if (n == 0) return word;
  std::vector<int> best = codes;
  std::vector<int> inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[i] = inv_code(codes[n - 1 - i]);
  for (const auto* w : {&codes, &inv}) {
    for (std::size_t s = 0; s < n; ++s) {
      std::vector<int> rot(n);
      for (std::size_t i = 0; i < n; ++i) rot[i] = (*w)[(i + s) % n];
      if (rot < best) best = rot;
    }
  }
  return from_codes(best);
}

std::vector<Word> enumerate_conjugacy_words(const SurfaceGroupPresentation& presentation, int max_len) {
  std::vector<Word> out;
  const int alphabet = 2 * presentation.generator_count();
  for (int len = 1; len <= max_len; ++len) {
    for (int c0 = 0; c0 < alphabet; ++c0) {
      if (inv_code(c0) < c0) continue;
      std::vector<int> codes{c0};
      codes.reserve(static_cast<std::size_t>(len));
      extend(codes, len, alphabet, out);
    }
  }
  return out;
}

}  // namespace fdom
