#include "cubature/tree.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cubature/detail/parallel.hpp"
#include "cubature/rng.hpp"

namespace cubature {

BudgetExceeded::BudgetExceeded(std::int64_t leaves_, std::int64_t cap_)
    : std::runtime_error("tree has " + std::to_string(leaves_) + " leaves, above the cap of " +
                         std::to_string(cap_) + "; use Monte-Carlo evaluation"),
      leaves(leaves_),
      cap(cap_) {}

std::vector<double> uniform_partition(double horizon, int p) {
  if (!(horizon > 0.0)) throw std::invalid_argument("uniform_partition: horizon must be positive");
  if (p < 1) throw std::invalid_argument("uniform_partition: p must be >= 1");
  std::vector<double> t(p + 1);
  for (int r = 0; r <= p; ++r) t[r] = horizon * static_cast<double>(r) / p;
  return t;
}

double leaf_weight(const CubatureFormula& formula, const TreeAddress& address) {
  double w = 1.0;
  for (int l : address) {
    if (l < 0 || l >= formula.size())
      throw std::invalid_argument("leaf_weight: address entry out of range");
    w *= formula.weights[l];
  }
  return w;
}

using detail::parallel_for;

namespace {

TreeAddress address_of_rank(std::int64_t rank, int n_paths, int p) {
  TreeAddress address(p);
  for (int r = p - 1; r >= 0; --r) {
    address[r] = static_cast<int>(rank % n_paths);
    rank /= n_paths;
  }
  return address;
}

double leaf_value(const SpdeModel& model, const GridFunction& x0, const Observable& phi,
                  const CubatureFormula& formula, const std::vector<double>& partition,
                  const TreeAddress& address, const SolverConfig& cfg) {
  return phi(solve_along_path(model, x0, concatenate(formula, partition, address), cfg));
}

}  // namespace

TreeEstimate evaluate_full(const SpdeModel& model, const GridFunction& x0,
                           const Observable& phi, const CubatureFormula& formula,
                           const std::vector<double>& partition, const SolverConfig& cfg,
                           const TreeOptions& opts) {
  const int p = static_cast<int>(partition.size()) - 1;
  if (p < 1) throw std::invalid_argument("evaluate_full: partition needs >= 2 times");
  std::int64_t leaves = 1;
  for (int r = 0; r < p; ++r) {
    leaves *= formula.size();
    if (leaves > opts.leaf_cap) throw BudgetExceeded(leaves, opts.leaf_cap);
  }

  std::vector<double> values(static_cast<std::size_t>(leaves));
  parallel_for(leaves, opts.threads, [&](std::int64_t rank) {
    values[static_cast<std::size_t>(rank)] = leaf_value(
        model, x0, phi, formula, partition, address_of_rank(rank, formula.size(), p), cfg);
  });

  // Deterministic reduction: ascending address order.
  double sum = 0.0;
  for (std::int64_t rank = 0; rank < leaves; ++rank)
    sum += leaf_weight(formula, address_of_rank(rank, formula.size(), p)) *
           values[static_cast<std::size_t>(rank)];

  TreeEstimate estimate;
  estimate.value = sum;
  estimate.leaf_count = leaves;
  return estimate;
}

std::vector<double> mc_leaf_samples(const SpdeModel& model, const GridFunction& x0,
                                    const Observable& phi, const CubatureFormula& formula,
                                    const std::vector<double>& partition,
                                    const SolverConfig& cfg, std::int64_t samples,
                                    std::uint64_t seed, const TreeOptions& opts) {
  const int p = static_cast<int>(partition.size()) - 1;
  if (p < 1) throw std::invalid_argument("mc_leaf_samples: partition needs >= 2 times");

  std::vector<double> cumulative(formula.weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < formula.weights.size(); ++i) {
    acc += formula.weights[i];
    cumulative[i] = acc;
  }

  std::vector<double> values(static_cast<std::size_t>(samples));
  parallel_for(samples, opts.threads, [&](std::int64_t s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    TreeAddress address(p);
    for (int r = 0; r < p; ++r) {
      const double u = rng.next_double() * acc;
      address[r] = static_cast<int>(
          std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      address[r] = std::min(address[r], formula.size() - 1);
    }
    values[static_cast<std::size_t>(s)] =
        leaf_value(model, x0, phi, formula, partition, address, cfg);
  });
  return values;
}

TreeEstimate evaluate_mc(const SpdeModel& model, const GridFunction& x0,
                         const Observable& phi, const CubatureFormula& formula,
                         const std::vector<double>& partition, const SolverConfig& cfg,
                         std::int64_t samples, std::uint64_t seed, const TreeOptions& opts) {
  if (samples < 2) throw std::invalid_argument("evaluate_mc: need at least 2 samples");
  const std::vector<double> values =
      mc_leaf_samples(model, x0, phi, formula, partition, cfg, samples, seed, opts);

  // Welford keeps the spread exactly zero for constant samples (single-path
  // formulas) and is the deterministic reduction order.
  double mean = 0.0, m2 = 0.0;
  std::int64_t count = 0;
  for (double v : values) {
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  }
  const double sd = std::sqrt(m2 / static_cast<double>(samples - 1));

  TreeEstimate estimate;
  estimate.value = mean;
  estimate.leaf_count = samples;
  estimate.std_error = sd / std::sqrt(static_cast<double>(samples));
  estimate.seed = seed;
  return estimate;
}

}  // namespace cubature
