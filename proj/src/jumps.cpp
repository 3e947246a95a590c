#include "cubature/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cubature/detail/parallel.hpp"
#include "cubature/rng.hpp"

namespace cubature {

void JumpSpec::validate() const {
  if (rates.size() != sizes.size())
    throw std::invalid_argument("JumpSpec: rates and sizes must have equal length");
  for (double mu : rates)
    if (!(mu > 0.0)) throw std::invalid_argument("JumpSpec: rates must be positive");
  for (double z : sizes)
    if (z == 0.0) throw std::invalid_argument("JumpSpec: jump sizes must be nonzero");
}

double poisson_weight(int n, double mu, double t) {
  if (n < 0) throw std::invalid_argument("poisson_weight: n must be >= 0");
  // Log-space keeps large n safe.
  double log_p = -mu * t + n * std::log(mu * t);
  for (int k = 2; k <= n; ++k) log_p -= std::log(static_cast<double>(k));
  return n == 0 ? std::exp(-mu * t) : std::exp(log_p);
}

JumpScenario sample_jump_times(const std::vector<int>& counts, double t, std::uint64_t seed) {
  if (!(t > 0.0)) throw std::invalid_argument("sample_jump_times: t must be positive");
  JumpScenario scenario;
  scenario.horizon = t;
  scenario.counts = counts;
  Rng rng(seed);
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] < 0) throw std::invalid_argument("sample_jump_times: negative count");
    for (int k = 0; k < counts[j]; ++k)
      scenario.jumps.push_back({t * rng.next_double(), static_cast<int>(j)});
  }
  std::stable_sort(scenario.jumps.begin(), scenario.jumps.end(),
                   [](const TimedJump& a, const TimedJump& b) { return a.time < b.time; });
  return scenario;
}

GridFunction apply_jump(const SpdeModel& model, const GridFunction& x, int type,
                        const JumpSpec& spec) {
  if (type < 0 || type >= spec.types())
    throw std::invalid_argument("apply_jump: jump type out of range");
  if (static_cast<std::size_t>(type) >= model.jump_fields.size() || !model.jump_fields[type])
    return x;  // absent field means delta_j == 0
  return x + spec.sizes[type] * model.jump_fields[type](x);
}

DegreeUnderflow::DegreeUnderflow(int reduced)
    : std::invalid_argument("reduced cubature degree m' = " + std::to_string(reduced) +
                            " is below 1; scenario must be excluded"),
      reduced_degree(reduced) {}

double evaluate_jump_conditional(const SpdeModel& model, const GridFunction& x0,
                                 const Observable& phi, const JumpSpec& spec,
                                 const JumpScenario& scenario, int degree,
                                 const SolverConfig& cfg) {
  const int n = scenario.total_jumps();
  const int reduced = degree - 2 * n;
  if (reduced < 1) throw DegreeUnderflow(reduced);
  const CubatureFormula& formula = formula_for_degree(model.brownian_dimension(), reduced);

  // Interval boundaries: 0, jump times, horizon.
  std::vector<double> bounds;
  bounds.reserve(n + 2);
  bounds.push_back(0.0);
  for (const TimedJump& j : scenario.jumps) bounds.push_back(j.time);
  bounds.push_back(scenario.horizon);

  const int levels = n + 1;
  std::int64_t leaves = 1;
  for (int q = 0; q < levels; ++q) leaves *= formula.size();

  double sum = 0.0;
  TreeAddress address(levels, 0);
  for (std::int64_t rank = 0; rank < leaves; ++rank) {
    std::int64_t rest = rank;
    for (int q = levels - 1; q >= 0; --q) {
      address[q] = static_cast<int>(rest % formula.size());
      rest /= formula.size();
    }
    GridFunction x = x0;
    for (int q = 0; q < levels; ++q) {
      const double span = bounds[q + 1] - bounds[q];
      if (span > 0.0) {
        const std::vector<double> piece{0.0, span};
        x = solve_along_path(model, x,
                             concatenate(formula, piece, {address[q]}), cfg);
      }
      if (q < n) x = apply_jump(model, x, scenario.jumps[q].type, spec);
    }
    sum += leaf_weight(formula, address) * phi(x);
  }
  return sum;
}

namespace {

void enumerate_counts(int types, int budget, std::vector<int>& current,
                      std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == types) {
    out.push_back(current);
    return;
  }
  for (int n = 0; n <= budget; ++n) {
    current.push_back(n);
    enumerate_counts(types, budget - n, current, out);
    current.pop_back();
  }
}

}  // namespace

TreeEstimate evaluate_jump_expectation(const SpdeModel& model, const GridFunction& x0,
                                       const Observable& phi, const JumpSpec& spec,
                                       int degree, double horizon, int mc_scenarios,
                                       std::uint64_t seed, const SolverConfig& cfg,
                                       const TreeOptions& opts) {
  spec.validate();
  if (degree < 1) throw std::invalid_argument("evaluate_jump_expectation: degree must be >= 1");
  if (mc_scenarios < 1)
    throw std::invalid_argument("evaluate_jump_expectation: need at least 1 scenario");

  // Count vectors with 2(n_1+...+n_e) <= m; those with m' = m-2n == 0
  // (even m) are excluded and their weight reported as truncation mass.
  std::vector<std::vector<int>> count_vectors;
  std::vector<int> scratch;
  enumerate_counts(spec.types(), degree / 2, scratch, count_vectors);

  double value = 0.0;
  double variance = 0.0;
  double included_mass = 0.0;
  std::int64_t conditionals = 0;

  for (std::size_t vec_index = 0; vec_index < count_vectors.size(); ++vec_index) {
    const std::vector<int>& counts = count_vectors[vec_index];
    int total = 0;
    for (int n : counts) total += n;
    if (degree - 2 * total < 1) continue;

    double weight = 1.0;
    for (int j = 0; j < spec.types(); ++j)
      weight *= poisson_weight(counts[j], spec.rates[j], horizon);
    included_mass += weight;

    if (total == 0) {
      const JumpScenario empty{horizon, counts, {}};
      value += weight * evaluate_jump_conditional(model, x0, phi, spec, empty, degree, cfg);
      ++conditionals;
      continue;
    }

    std::vector<double> draws(static_cast<std::size_t>(mc_scenarios));
    detail::parallel_for(mc_scenarios, opts.threads, [&](std::int64_t s) {
      const std::uint64_t scenario_seed =
          derive_seed(derive_seed(seed, vec_index), static_cast<std::uint64_t>(s));
      const JumpScenario scenario = sample_jump_times(counts, horizon, scenario_seed);
      draws[static_cast<std::size_t>(s)] =
          evaluate_jump_conditional(model, x0, phi, spec, scenario, degree, cfg);
    });
    conditionals += mc_scenarios;

    // Welford: exact zero spread when the conditional does not depend on
    // the jump times (e.g. constant-free scalar checks).
    double mean = 0.0, m2 = 0.0;
    std::int64_t count = 0;
    for (double v : draws) {
      ++count;
      const double delta = v - mean;
      mean += delta / static_cast<double>(count);
      m2 += delta * (v - mean);
    }
    value += weight * mean;
    if (mc_scenarios > 1) {
      const double sample_var = m2 / static_cast<double>(mc_scenarios - 1);
      variance += weight * weight * sample_var / static_cast<double>(mc_scenarios);
    }
  }

  TreeEstimate estimate;
  estimate.value = value;
  estimate.leaf_count = conditionals;
  estimate.std_error = std::sqrt(variance);
  estimate.seed = seed;
  estimate.truncation_mass = 1.0 - included_mass;
  return estimate;
}

}  // namespace cubature
