#include "cubature/words.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace cubature {

Rational Rational::of(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational{num, den};
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational::of(a.num * b.den + b.num * a.den, a.den * b.den);
}

Rational operator*(const Rational& a, const Rational& b) {
  return Rational::of(a.num * b.num, a.den * b.den);
}

int degree(const Word& w) {
  int zeros = 0;
  for (int letter : w)
    if (letter == 0) ++zeros;
  return static_cast<int>(w.size()) + zeros;
}

bool graded_lex_less(const Word& a, const Word& b) {
  const int da = degree(a), db = degree(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

namespace {

void extend_words(const Word& prefix, int prefix_degree, int d, int max_degree,
                  std::vector<Word>& out) {
  for (int letter = 0; letter <= d; ++letter) {
    const int deg = prefix_degree + (letter == 0 ? 2 : 1);
    if (deg > max_degree) continue;
    Word w = prefix;
    w.push_back(letter);
    out.push_back(w);
    extend_words(w, deg, d, max_degree, out);
  }
}

}  // namespace

std::vector<Word> enumerate_words(int d, int max_degree) {
  if (d < 1) throw std::invalid_argument("enumerate_words: d must be >= 1");
  if (max_degree < 1) throw std::invalid_argument("enumerate_words: degree must be >= 1");
  std::vector<Word> out;
  extend_words({}, 0, d, max_degree, out);
  std::sort(out.begin(), out.end(), graded_lex_less);
  return out;
}

WordCombination strat_to_ito(const Word& w) {
  if (w.size() <= 1) return {{w, Rational{1, 1}}};
  const Word rest(w.begin() + 1, w.end());
  WordCombination out;
  auto accumulate = [&out](const Word& word, const Rational& coeff) {
    auto [it, inserted] = out.try_emplace(word, coeff);
    if (!inserted) {
      it->second = it->second + coeff;
      if (it->second.is_zero()) out.erase(it);
    }
  };
  for (const auto& [word, coeff] : strat_to_ito(rest)) {
    Word extended;
    extended.reserve(word.size() + 1);
    extended.push_back(w[0]);
    extended.insert(extended.end(), word.begin(), word.end());
    accumulate(extended, coeff);
  }
  // Adjacent equal nonzero leading pair contracts to a time letter.
  if (w[0] != 0 && w[1] == w[0]) {
    const Word tail(w.begin() + 2, w.end());
    for (const auto& [word, coeff] : strat_to_ito(tail)) {
      Word contracted;
      contracted.reserve(word.size() + 1);
      contracted.push_back(0);
      contracted.insert(contracted.end(), word.begin(), word.end());
      accumulate(contracted, coeff * Rational{1, 2});
    }
  }
  return out;
}

double expected_stratonovich(const Word& w, double t) {
  double total = 0.0;
  for (const auto& [word, coeff] : strat_to_ito(w)) {
    if (std::any_of(word.begin(), word.end(), [](int l) { return l != 0; })) continue;
    // E[ iterated dt integral of length k ] = t^k / k!
    double simplex_volume = 1.0;
    for (std::size_t k = 1; k <= word.size(); ++k) simplex_volume *= t / static_cast<double>(k);
    total += coeff.value() * simplex_volume;
  }
  return total;
}

int regularity_degree(int m) {
  if (m < 1) throw std::invalid_argument("regularity_degree: m must be >= 1");
  return m / 2 + 1;
}

std::string to_string(const Word& w) {
  std::string s = "(";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i > 0) s += ",";
    s += std::to_string(w[i]);
  }
  s += ")";
  return s;
}

}  // namespace cubature
