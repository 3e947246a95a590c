#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cubature/models.hpp"
#include "cubature/pde.hpp"
#include "cubature/tree.hpp"

namespace cubature {

/// Compound-Poisson drivers: rate and point-mass jump size per type.
struct JumpSpec {
  std::vector<double> rates;  // mu_j > 0
  std::vector<double> sizes;  // z_j != 0

  int types() const { return static_cast<int>(rates.size()); }
  void validate() const;
};

struct TimedJump {
  double time;
  int type;  // 0-based index into JumpSpec
};

/// Jump counts per type plus the merged, sorted jump times on [0, horizon].
struct JumpScenario {
  double horizon = 0;
  std::vector<int> counts;
  std::vector<TimedJump> jumps;

  int total_jumps() const { return static_cast<int>(jumps.size()); }
};

/// P(N_t = n) = (mu t)^n e^{-mu t} / n!.
double poisson_weight(int n, double mu, double t);

/// Conditioned on the counts, the jump times of each type are the order
/// statistics of i.i.d. uniforms on [0, t]; types are merged by time.
/// Deterministic for a fixed seed.
JumpScenario sample_jump_times(const std::vector<int>& counts, double t, std::uint64_t seed);

/// x + delta_j(x) * z_j.
GridFunction apply_jump(const SpdeModel& model, const GridFunction& x, int type,
                        const JumpSpec& spec);

struct DegreeUnderflow : std::invalid_argument {
  explicit DegreeUnderflow(int reduced_degree);
  int reduced_degree;
};

/// E[phi(X_t) | jump scenario]: a full cubature tree with one level per
/// inter-jump interval, using the registered formula for the reduced
/// degree m' = m - 2n, applying the jump map at each jump time.
/// Throws DegreeUnderflow when m' < 1.
double evaluate_jump_conditional(const SpdeModel& model, const GridFunction& x0,
                                 const Observable& phi, const JumpSpec& spec,
                                 const JumpScenario& scenario, int degree,
                                 const SolverConfig& cfg);

/// Outer Poisson-weighted sum over count vectors with 2(n_1+...+n_e) <= m,
/// each conditional integrated over its jump-time simplex by Monte-Carlo
/// (mc_scenarios draws, RNG split per scenario). Count vectors whose
/// reduced degree would drop below 1 are excluded; their weight is
/// reported as TreeEstimate::truncation_mass.
TreeEstimate evaluate_jump_expectation(const SpdeModel& model, const GridFunction& x0,
                                       const Observable& phi, const JumpSpec& spec,
                                       int degree, double horizon, int mc_scenarios,
                                       std::uint64_t seed, const SolverConfig& cfg,
                                       const TreeOptions& opts = {});

}  // namespace cubature
