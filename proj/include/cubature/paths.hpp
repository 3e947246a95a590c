#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <vector>

#include "cubature/words.hpp"

namespace cubature {

/// Piecewise-linear path with values in R^{d+1}. Row 0 of `values` is the
/// time component and equals the knot time at every knot; rows 1..d carry
/// the Brownian components.
struct PiecewiseLinearPath {
  Eigen::VectorXd knots;   // strictly increasing, at least 2 entries
  Eigen::MatrixXd values;  // (d+1) x knots.size(), row 0 == knots

  int dimension() const { return static_cast<int>(values.rows()) - 1; }
  int segments() const { return static_cast<int>(knots.size()) - 1; }
  double start_time() const { return knots(0); }
  double end_time() const { return knots(knots.size() - 1); }

  /// Throws std::invalid_argument when the knot/value invariants fail.
  void validate() const;
};

/// Sparse truncated signature: iterated integrals keyed by word, up to the
/// degree cap used to build it. The empty word always maps to 1.
using Signature = std::map<Word, double>;

/// Signature of a single linear segment with total increment `increment`
/// in R^{d+1}: entry for (i1,...,ik) is increment(i1)...increment(ik)/k!.
Signature segment_signature(const Eigen::VectorXd& increment, int degree_cap);

/// Chen product of two signatures, truncated at `degree_cap`.
Signature chen_product(const Signature& a, const Signature& b, int degree_cap);

/// Signature of a whole path: Chen concatenation of its segment signatures.
Signature path_signature(const PiecewiseLinearPath& path, int degree_cap);

/// Weighted bounded-variation paths on [0,1] matching the Brownian
/// expectations of all iterated Stratonovich integrals up to `degree`.
struct CubatureFormula {
  int dimension = 0;  // d
  int degree = 0;     // m
  std::vector<double> weights;
  std::vector<PiecewiseLinearPath> paths;

  int size() const { return static_cast<int>(weights.size()); }
};

struct MomentCheck {
  Word word;
  double weighted_sum = 0;  // sum_l lambda_l B^w(omega_l)
  double expected = 0;      // E[B^w_t]
  bool pass = false;
};

struct CubatureReport {
  std::vector<MomentCheck> rows;
  double max_abs_error = 0;
  bool all_pass = true;
};

/// Checks every word with degree <= formula.degree against
/// expected_stratonovich over the paths' common time interval.
/// Failures are recorded in the report, not thrown.
CubatureReport verify_cubature(const CubatureFormula& formula, double tol);

/// Signatures of all formula paths. degree_cap <= 0 selects the default
/// formula.degree + 2, covering the verification window plus the first
/// remainder band for diagnostics.
std::vector<Signature> formula_signatures(const CubatureFormula& formula, int degree_cap = 0);

/// Degree-3 formula in dimension d: 2d straight-line paths over [0,1] with
/// Brownian increments +-sqrt(d) e_i and uniform weights 1/(2d).
CubatureFormula standard_formula(int d);

/// Degree-1 formula: the single pure-time path with weight 1.
CubatureFormula time_only_formula(int d);

/// Registry lookup: the cached, verified formula of smallest registered
/// degree >= min_degree (falling back to the largest registered degree
/// when min_degree exceeds everything on file). Registered degrees: 1, 3.
const CubatureFormula& formula_for_degree(int d, int min_degree);

/// Brownian rescaling of the formula paths from [0,1] to [0,t]:
/// time component s, Brownian components sqrt(t) * omega(s/t).
/// Throws std::invalid_argument when t <= 0.
std::vector<PiecewiseLinearPath> scale_to_interval(const CubatureFormula& formula, double t);

/// Concatenation of per-interval rescaled formula paths along a partition
/// 0 = t_0 < ... < t_p = T. `address` holds 0-based path indices, one per
/// interval. Each piece starts at the previous piece's endpoint.
PiecewiseLinearPath concatenate(const CubatureFormula& formula,
                                const std::vector<double>& partition,
                                const std::vector<int>& address);

/// Plain-text table round-trip. First line: dimension, degree, path count.
/// Then one line per knot: path index, weight, knot time, d+1 values,
/// printed with enough digits for an exact double round-trip.
void write_formula(std::ostream& os, const CubatureFormula& formula);
CubatureFormula read_formula(std::istream& is);

}  // namespace cubature
