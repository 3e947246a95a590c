#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cubature {

/// Multi-index over the alphabet {0, 1, ..., d}. Letter 0 is the time
/// component; it counts twice toward the degree because time scales like
/// the square of a Brownian increment.
using Word = std::vector<int>;

/// Exact rational coefficient. The Stratonovich-to-Ito contraction only
/// ever produces dyadic coefficients, so int64 components are ample.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;  // invariant: den > 0, gcd(|num|, den) == 1

  static Rational of(std::int64_t num, std::int64_t den);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool is_zero() const { return num == 0; }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) = default;
};

/// Linear combination of words with exact rational coefficients.
/// Zero coefficients are never stored.
using WordCombination = std::map<Word, Rational>;

/// deg(w) = length(w) + #{zero letters of w}.
int degree(const Word& w);

/// Graded-lexicographic order: by degree, then lexicographic with 0 < 1 < ... < d.
bool graded_lex_less(const Word& a, const Word& b);

/// All nonempty words over {0,...,d} with degree <= max_degree, in
/// graded-lexicographic order. Throws std::invalid_argument when d < 1
/// or max_degree < 1.
std::vector<Word> enumerate_words(int d, int max_degree);

/// Expansion of the iterated Stratonovich integral indexed by `w` as a
/// combination of iterated Ito integrals: one term per selection of
/// pairwise-disjoint adjacent positions carrying equal nonzero letters,
/// each selected pair contracted to a single 0 letter with a factor 1/2.
WordCombination strat_to_ito(const Word& w);

/// E[B^w_t] for a d-dimensional Brownian motion: an iterated Ito integral
/// has expectation t^k/k! when all k letters are 0 and 0 otherwise, so
/// the value comes from the all-zero terms of strat_to_ito(w).
double expected_stratonovich(const Word& w, double t);

/// r(m) = floor(m/2) + 1, the power of the generator whose domain must
/// contain the initial value for the degree-m expansion.
int regularity_degree(int m);

/// "(i1,i2,...)" rendering for reports and error messages.
std::string to_string(const Word& w);

}  // namespace cubature
