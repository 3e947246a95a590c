#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace cubature {

/// State of the discretized equation on the interior points of ]0,1[ with
/// uniform spacing h = 1/(n+1) and homogeneous Dirichlet boundaries.
using GridFunction = Eigen::VectorXd;

using FieldFn = std::function<GridFunction(const GridFunction&)>;
using Observable = std::function<double(const GridFunction&)>;

/// Tridiagonal operator. `lower` and `upper` have size n-1; either may be
/// all zeros (the transport generator is upper-bidiagonal).
struct TridiagonalOperator {
  Eigen::VectorXd lower, diag, upper;

  int size() const { return static_cast<int>(diag.size()); }
  GridFunction apply(const GridFunction& x) const;
};

/// Thomas algorithm. Exact (no pivoting) for the diagonally dominant
/// systems this library assembles.
Eigen::VectorXd solve_tridiagonal(const Eigen::VectorXd& lower,
                                  const Eigen::VectorXd& diag,
                                  const Eigen::VectorXd& upper,
                                  const Eigen::VectorXd& rhs);

enum class ModelKind { ou, nemytskii, transport };
enum class InitialData { sine, irregular };
enum class GeneratorKind { laplacian, transport_upwind };

struct ModelSpec {
  ModelKind name = ModelKind::ou;
  int n_int = 50;
  InitialData initial = InitialData::sine;
  int phi_mode = 1;  // ou noise coefficient phi(u) = sin(phi_mode*pi*u)
};

/// Discretized equation dX = (A X + alpha(X)) dt + sum_i beta_i(X) dB^i
/// (+ jump fields), with its observable. Immutable after construction;
/// field evaluators are pure.
struct SpdeModel {
  int n_int = 0;
  double h = 0;  // grid spacing 1/(n_int+1)
  TridiagonalOperator generator;
  FieldFn drift;                                // alpha; empty means zero
  std::vector<FieldFn> volatility;              // beta_i
  std::vector<FieldFn> volatility_correction;   // D beta_i(x) . beta_i(x)
  std::vector<FieldFn> jump_fields;             // delta_j
  Observable observable;

  int brownian_dimension() const { return static_cast<int>(volatility.size()); }
};

ModelKind model_kind_from_string(const std::string& name);
InitialData initial_from_string(const std::string& name);

/// Interior grid points u_i = i*h, i = 1..n_int.
Eigen::VectorXd grid_points(int n_int);

/// laplacian: (1, -2, 1)/h^2. transport_upwind: forward differences
/// (x_{i+1} - x_i)/h with zero inflow at the right boundary.
/// Throws std::invalid_argument when n_int < 3.
TridiagonalOperator generator_matrix(GeneratorKind kind, int n_int);

/// Initial data sampled on the interior grid. The irregular profile
/// 0.5*sqrt((1-2|u-1/2|)/sqrt(|u-1/2|)) is set to 0 (with a warning on
/// stderr) if a node lands exactly on the u=1/2 singularity.
GridFunction sample_initial(InitialData kind, int n_int);

/// Model plus its initial state.
std::pair<SpdeModel, GridFunction> build_model(const ModelSpec& spec);

/// Stratonovich-corrected drift beta_0(x) = A x + alpha(x)
/// - (1/2) sum_i D beta_i(x) . beta_i(x).
GridFunction stratonovich_correction(const SpdeModel& model, const GridFunction& x);

/// Trapezoidal approximation of int_0^1 x(u) du with zero boundary values,
/// i.e. h * sum of interior values.
double phi_functional(const GridFunction& x);

}  // namespace cubature
