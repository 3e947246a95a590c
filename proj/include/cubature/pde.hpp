#pragma once

#include <stdexcept>

#include "cubature/models.hpp"
#include "cubature/paths.hpp"

namespace cubature {

/// Time stepping for the deterministic evolution along one cubature path.
/// theta = 1/2 is Crank-Nicolson on the linear part; the corrected drift
/// and the path-slope forcing are treated explicitly.
struct SolverConfig {
  int steps_per_interval = 50;
  double theta = 0.5;
};

/// Substep count giving a total budget of `budget` steps split over p
/// cubature intervals, never below 50 per interval.
int default_steps_per_interval(int p, int budget = 500);

struct NumericalBlowup : std::runtime_error {
  explicit NumericalBlowup(int step);
  int step_index;
};

/// One theta-scheme step for dX = (A X + g(X)) dt with
/// g(x) = alpha(x) - (1/2) sum_i D beta_i(x).beta_i(x) + sum_i beta_i(x) slope_i:
/// solves (I - theta dt A) x+ = x + dt (1-theta) A x + dt g(x) by the
/// Thomas algorithm. Throws NumericalBlowup if the result is not finite.
GridFunction imex_step(const SpdeModel& model, const GridFunction& x, double dt,
                       const Eigen::VectorXd& slope, double theta = 0.5);

/// Evolves x0 along the whole path, one constant slope per linear segment,
/// cfg.steps_per_interval substeps per segment.
GridFunction solve_along_path(const SpdeModel& model, const GridFunction& x0,
                              const PiecewiseLinearPath& path, const SolverConfig& cfg);

}  // namespace cubature
