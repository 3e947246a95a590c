#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cubature/models.hpp"
#include "cubature/paths.hpp"
#include "cubature/pde.hpp"

namespace cubature {

/// One leaf of the cubature tree: a path index per partition interval,
/// 0-based into the formula's path list.
using TreeAddress = std::vector<int>;

struct TreeEstimate {
  double value = 0;
  std::int64_t leaf_count = 0;                  // N^p (full) or sample count (MC)
  std::optional<double> std_error;              // MC modes only
  std::optional<std::uint64_t> seed;            // MC modes only
  std::optional<double> truncation_mass;        // jump expectations only
};

struct TreeOptions {
  std::int64_t leaf_cap = std::int64_t{1} << 16;
  int threads = 1;
};

struct BudgetExceeded : std::runtime_error {
  BudgetExceeded(std::int64_t leaves, std::int64_t cap);
  std::int64_t leaves, cap;
};

std::vector<double> uniform_partition(double horizon, int p);

/// Product of per-level weights lambda_{l_1} ... lambda_{l_p}.
double leaf_weight(const CubatureFormula& formula, const TreeAddress& address);

/// Weighted sum of phi over every leaf of the N^p tree, leaves summed in
/// ascending address order regardless of thread count. Throws
/// BudgetExceeded when N^p exceeds opts.leaf_cap (use evaluate_mc then).
TreeEstimate evaluate_full(const SpdeModel& model, const GridFunction& x0,
                           const Observable& phi, const CubatureFormula& formula,
                           const std::vector<double>& partition, const SolverConfig& cfg,
                           const TreeOptions& opts = {});

/// The individual leaf values behind evaluate_mc: addresses drawn i.i.d.
/// with probability lambda_{l_1}...lambda_{l_p}, one decorrelated RNG
/// substream per sample so results do not depend on scheduling.
std::vector<double> mc_leaf_samples(const SpdeModel& model, const GridFunction& x0,
                                    const Observable& phi, const CubatureFormula& formula,
                                    const std::vector<double>& partition,
                                    const SolverConfig& cfg, std::int64_t samples,
                                    std::uint64_t seed, const TreeOptions& opts = {});

/// Monte-Carlo estimate on the tree; std_error = sample sd / sqrt(samples).
/// Deterministic for a fixed seed. Requires samples >= 2.
TreeEstimate evaluate_mc(const SpdeModel& model, const GridFunction& x0,
                         const Observable& phi, const CubatureFormula& formula,
                         const std::vector<double>& partition, const SolverConfig& cfg,
                         std::int64_t samples, std::uint64_t seed,
                         const TreeOptions& opts = {});

}  // namespace cubature
