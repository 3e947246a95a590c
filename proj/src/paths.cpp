#include "cubature/paths.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cubature {

void PiecewiseLinearPath::validate() const {
  if (knots.size() < 2) throw std::invalid_argument("path: need at least 2 knots");
  if (values.cols() != knots.size() || values.rows() < 2)
    throw std::invalid_argument("path: values shape does not match knots");
  for (int k = 0; k + 1 < knots.size(); ++k)
    if (!(knots(k) < knots(k + 1)))
      throw std::invalid_argument("path: knot times must be strictly increasing");
  for (int k = 0; k < knots.size(); ++k)
    if (std::abs(values(0, k) - knots(k)) > 1e-12 * std::max(1.0, std::abs(knots(k))))
      throw std::invalid_argument("path: time component must equal the knot time");
}

Signature segment_signature(const Eigen::VectorXd& increment, int degree_cap) {
  if (degree_cap < 1) throw std::invalid_argument("segment_signature: degree_cap must be >= 1");
  Signature sig;
  sig[{}] = 1.0;
  // Depth-first over words with degree <= cap, carrying the running product.
  struct Frame {
    Word word;
    int deg;
    double product;
  };
  std::vector<Frame> stack;
  stack.push_back({{}, 0, 1.0});
  const int d = static_cast<int>(increment.size()) - 1;
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    for (int letter = 0; letter <= d; ++letter) {
      const int deg = f.deg + (letter == 0 ? 2 : 1);
      if (deg > degree_cap) continue;
      if (increment(letter) == 0.0) continue;  // whole subtree vanishes
      Frame child;
      child.word = f.word;
      child.word.push_back(letter);
      child.deg = deg;
      child.product = f.product * increment(letter) / static_cast<double>(child.word.size());
      sig[child.word] = child.product;
      stack.push_back(std::move(child));
    }
  }
  return sig;
}

Signature chen_product(const Signature& a, const Signature& b, int degree_cap) {
  Signature out;
  for (const auto& [wa, va] : a) {
    if (va == 0.0) continue;
    const int da = degree(wa);
    for (const auto& [wb, vb] : b) {
      if (vb == 0.0 || da + degree(wb) > degree_cap) continue;
      Word w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      out[w] += va * vb;
    }
  }
  return out;
}

Signature path_signature(const PiecewiseLinearPath& path, int degree_cap) {
  Signature acc;
  acc[{}] = 1.0;
  for (int k = 0; k + 1 < path.knots.size(); ++k) {
    const Eigen::VectorXd increment = path.values.col(k + 1) - path.values.col(k);
    acc = chen_product(acc, segment_signature(increment, degree_cap), degree_cap);
  }
  return acc;
}

CubatureReport verify_cubature(const CubatureFormula& formula, double tol) {
  if (formula.size() == 0) throw std::invalid_argument("verify_cubature: empty formula");
  const double t0 = formula.paths.front().start_time();
  const double t1 = formula.paths.front().end_time();
  const double elapsed = t1 - t0;

  std::vector<Signature> sigs;
  sigs.reserve(formula.paths.size());
  for (const auto& p : formula.paths) sigs.push_back(path_signature(p, formula.degree));

  CubatureReport report;
  for (const Word& w : enumerate_words(formula.dimension, formula.degree)) {
    MomentCheck row;
    row.word = w;
    for (int l = 0; l < formula.size(); ++l) {
      auto it = sigs[l].find(w);
      row.weighted_sum += formula.weights[l] * (it == sigs[l].end() ? 0.0 : it->second);
    }
    row.expected = expected_stratonovich(w, elapsed);
    row.pass = std::abs(row.weighted_sum - row.expected) <= tol;
    report.max_abs_error = std::max(report.max_abs_error, std::abs(row.weighted_sum - row.expected));
    report.all_pass = report.all_pass && row.pass;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<Signature> formula_signatures(const CubatureFormula& formula, int degree_cap) {
  if (degree_cap <= 0) degree_cap = formula.degree + 2;
  std::vector<Signature> sigs;
  sigs.reserve(formula.paths.size());
  for (const auto& p : formula.paths) sigs.push_back(path_signature(p, degree_cap));
  return sigs;
}

namespace {

PiecewiseLinearPath straight_line(int d, int brownian_component, double endpoint) {
  PiecewiseLinearPath p;
  p.knots = Eigen::VectorXd::LinSpaced(2, 0.0, 1.0);
  p.values = Eigen::MatrixXd::Zero(d + 1, 2);
  p.values(0, 1) = 1.0;
  if (brownian_component >= 1) p.values(brownian_component, 1) = endpoint;
  return p;
}

}  // namespace

CubatureFormula standard_formula(int d) {
  if (d < 1) throw std::invalid_argument("standard_formula: d must be >= 1");
  CubatureFormula f;
  f.dimension = d;
  f.degree = 3;
  const double endpoint = std::sqrt(static_cast<double>(d));
  for (int i = 1; i <= d; ++i) {
    f.paths.push_back(straight_line(d, i, -endpoint));
    f.weights.push_back(1.0 / (2.0 * d));
    f.paths.push_back(straight_line(d, i, endpoint));
    f.weights.push_back(1.0 / (2.0 * d));
  }
  return f;
}

CubatureFormula time_only_formula(int d) {
  if (d < 1) throw std::invalid_argument("time_only_formula: d must be >= 1");
  CubatureFormula f;
  f.dimension = d;
  f.degree = 1;
  f.paths.push_back(straight_line(d, 0, 0.0));
  f.weights.push_back(1.0);
  return f;
}

const CubatureFormula& formula_for_degree(int d, int min_degree) {
  if (d < 1) throw std::invalid_argument("formula_for_degree: d must be >= 1");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, CubatureFormula> registry;
  const int registered_degree = min_degree <= 1 ? 1 : 3;  // degrees on file: 1, 3
  std::scoped_lock lock(mutex);
  auto key = std::make_pair(d, registered_degree);
  auto it = registry.find(key);
  if (it == registry.end()) {
    CubatureFormula f = registered_degree == 1 ? time_only_formula(d) : standard_formula(d);
    if (!verify_cubature(f, 1e-12).all_pass)
      throw std::logic_error("formula_for_degree: registry entry fails its moment conditions");
    it = registry.emplace(key, std::move(f)).first;
  }
  return it->second;
}

std::vector<PiecewiseLinearPath> scale_to_interval(const CubatureFormula& formula, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("scale_to_interval: t must be positive");
  const double root_t = std::sqrt(t);
  std::vector<PiecewiseLinearPath> scaled;
  scaled.reserve(formula.paths.size());
  for (const auto& p : formula.paths) {
    PiecewiseLinearPath q;
    q.knots = t * p.knots;
    q.values = root_t * p.values;
    q.values.row(0) = t * p.values.row(0);
    scaled.push_back(std::move(q));
  }
  return scaled;
}

PiecewiseLinearPath concatenate(const CubatureFormula& formula,
                                const std::vector<double>& partition,
                                const std::vector<int>& address) {
  if (partition.size() < 2) throw std::invalid_argument("concatenate: partition needs >= 2 times");
  const std::size_t p = partition.size() - 1;
  if (address.size() != p)
    throw std::invalid_argument("concatenate: address length must equal the interval count");
  for (int l : address)
    if (l < 0 || l >= formula.size())
      throw std::invalid_argument("concatenate: address entry out of range");

  const int d = formula.dimension;
  // Total knots: one start plus the non-initial knots of each piece.
  int total = 1;
  for (int l : address) total += formula.paths[l].segments();

  PiecewiseLinearPath out;
  out.knots.resize(total);
  out.values = Eigen::MatrixXd::Zero(d + 1, total);
  out.knots(0) = partition.front();
  out.values(0, 0) = partition.front();

  int col = 1;
  Eigen::VectorXd offset = Eigen::VectorXd::Zero(d);  // Brownian components only
  for (std::size_t r = 0; r < p; ++r) {
    const double dt = partition[r + 1] - partition[r];
    if (!(dt > 0.0)) throw std::invalid_argument("concatenate: partition must be increasing");
    const PiecewiseLinearPath& base = formula.paths[address[r]];
    const double root_dt = std::sqrt(dt);
    for (int k = 1; k < base.knots.size(); ++k, ++col) {
      out.knots(col) = partition[r] + dt * base.knots(k);
      out.values(0, col) = out.knots(col);
      out.values.col(col).tail(d) = offset + root_dt * base.values.col(k).tail(d);
    }
    offset += root_dt * base.values.col(base.knots.size() - 1).tail(d);
  }
  return out;
}

void write_formula(std::ostream& os, const CubatureFormula& formula) {
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << formula.dimension << " " << formula.degree << " " << formula.size() << "\n";
  for (int l = 0; l < formula.size(); ++l) {
    const auto& p = formula.paths[l];
    for (int k = 0; k < p.knots.size(); ++k) {
      os << l << " " << formula.weights[l] << " " << p.knots(k);
      for (int i = 0; i < p.values.rows(); ++i) os << " " << p.values(i, k);
      os << "\n";
    }
  }
}

CubatureFormula read_formula(std::istream& is) {
  CubatureFormula f;
  int n_paths = 0;
  if (!(is >> f.dimension >> f.degree >> n_paths))
    throw std::invalid_argument("read_formula: bad header line");
  std::vector<std::vector<double>> knots(n_paths);
  std::vector<std::vector<Eigen::VectorXd>> values(n_paths);
  f.weights.assign(n_paths, 0.0);
  int l = 0;
  double weight = 0, knot = 0;
  while (is >> l >> weight >> knot) {
    if (l < 0 || l >= n_paths) throw std::invalid_argument("read_formula: path index out of range");
    Eigen::VectorXd v(f.dimension + 1);
    for (int i = 0; i <= f.dimension; ++i)
      if (!(is >> v(i))) throw std::invalid_argument("read_formula: truncated value row");
    f.weights[l] = weight;
    knots[l].push_back(knot);
    values[l].push_back(std::move(v));
  }
  for (int i = 0; i < n_paths; ++i) {
    PiecewiseLinearPath p;
    p.knots = Eigen::Map<Eigen::VectorXd>(knots[i].data(), knots[i].size());
    p.values.resize(f.dimension + 1, knots[i].size());
    for (std::size_t k = 0; k < values[i].size(); ++k) p.values.col(k) = values[i][k];
    p.validate();
    f.paths.push_back(std::move(p));
  }
  return f;
}

}  // namespace cubature
