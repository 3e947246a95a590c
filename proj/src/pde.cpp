#include "cubature/pde.hpp"

#include <algorithm>
#include <string>

namespace cubature {

int default_steps_per_interval(int p, int budget) {
  if (p < 1) throw std::invalid_argument("default_steps_per_interval: p must be >= 1");
  return std::max(budget / p, 50);
}

NumericalBlowup::NumericalBlowup(int step)
    : std::runtime_error("numerical blowup at step " + std::to_string(step)),
      step_index(step) {}

namespace {

GridFunction forcing(const SpdeModel& model, const GridFunction& x,
                     const Eigen::VectorXd& slope) {
  GridFunction g = GridFunction::Zero(x.size());
  if (model.drift) g += model.drift(x);
  for (std::size_t i = 0; i < model.volatility.size(); ++i) {
    g -= 0.5 * model.volatility_correction[i](x);
    if (slope(static_cast<int>(i)) != 0.0) g += slope(static_cast<int>(i)) * model.volatility[i](x);
  }
  return g;
}

GridFunction theta_step(const SpdeModel& model, const GridFunction& x, double dt,
                        const Eigen::VectorXd& slope, double theta) {
  const TridiagonalOperator& a = model.generator;
  GridFunction rhs = x + dt * forcing(model, x, slope);
  if (theta < 1.0) rhs += ((1.0 - theta) * dt) * a.apply(x);
  if (theta == 0.0) return rhs;
  return solve_tridiagonal(-theta * dt * a.lower,
                           Eigen::VectorXd::Ones(a.size()) - theta * dt * a.diag,
                           -theta * dt * a.upper, rhs);
}

}  // namespace

GridFunction imex_step(const SpdeModel& model, const GridFunction& x, double dt,
                       const Eigen::VectorXd& slope, double theta) {
  if (!(dt > 0.0)) throw std::invalid_argument("imex_step: dt must be positive");
  GridFunction out = theta_step(model, x, dt, slope, theta);
  if (!out.allFinite()) throw NumericalBlowup(0);
  return out;
}

GridFunction solve_along_path(const SpdeModel& model, const GridFunction& x0,
                              const PiecewiseLinearPath& path, const SolverConfig& cfg) {
  if (cfg.steps_per_interval < 1)
    throw std::invalid_argument("solve_along_path: steps_per_interval must be >= 1");
  if (!(cfg.theta >= 0.0 && cfg.theta <= 1.0))
    throw std::invalid_argument("solve_along_path: theta must lie in [0,1]");
  if (x0.size() != model.n_int)
    throw std::invalid_argument("solve_along_path: grid size mismatch");

  const int d = model.brownian_dimension();
  GridFunction x = x0;
  int step = 0;
  for (int k = 0; k + 1 < path.knots.size(); ++k) {
    const double span = path.knots(k + 1) - path.knots(k);
    if (!(span > 0.0)) continue;
    Eigen::VectorXd slope =
        (path.values.col(k + 1).tail(d) - path.values.col(k).tail(d)) / span;
    const double dt = span / cfg.steps_per_interval;
    for (int s = 0; s < cfg.steps_per_interval; ++s, ++step) {
      x = theta_step(model, x, dt, slope, cfg.theta);
      if (!x.allFinite()) throw NumericalBlowup(step);
    }
  }
  return x;
}

}  // namespace cubature
