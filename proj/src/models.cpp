#include "cubature/models.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>

namespace cubature {

GridFunction TridiagonalOperator::apply(const GridFunction& x) const {
  const int n = size();
  if (x.size() != n) throw std::invalid_argument("TridiagonalOperator: size mismatch");
  GridFunction y = diag.cwiseProduct(x);
  y.head(n - 1) += upper.cwiseProduct(x.tail(n - 1));
  y.tail(n - 1) += lower.cwiseProduct(x.head(n - 1));
  return y;
}

Eigen::VectorXd solve_tridiagonal(const Eigen::VectorXd& lower,
                                  const Eigen::VectorXd& diag,
                                  const Eigen::VectorXd& upper,
                                  const Eigen::VectorXd& rhs) {
  const int n = static_cast<int>(diag.size());
  Eigen::VectorXd c(n), d(n);
  double pivot = diag(0);
  if (pivot == 0.0) throw std::runtime_error("solve_tridiagonal: zero pivot");
  c(0) = n > 1 ? upper(0) / pivot : 0.0;
  d(0) = rhs(0) / pivot;
  for (int i = 1; i < n; ++i) {
    pivot = diag(i) - lower(i - 1) * c(i - 1);
    if (pivot == 0.0) throw std::runtime_error("solve_tridiagonal: zero pivot");
    c(i) = i < n - 1 ? upper(i) / pivot : 0.0;
    d(i) = (rhs(i) - lower(i - 1) * d(i - 1)) / pivot;
  }
  for (int i = n - 2; i >= 0; --i) d(i) -= c(i) * d(i + 1);
  return d;
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "ou") return ModelKind::ou;
  if (name == "nemytskii") return ModelKind::nemytskii;
  if (name == "transport") return ModelKind::transport;
  throw std::invalid_argument("unknown model name: " + name);
}

InitialData initial_from_string(const std::string& name) {
  if (name == "sine") return InitialData::sine;
  if (name == "irregular") return InitialData::irregular;
  throw std::invalid_argument("unknown initial data: " + name);
}

Eigen::VectorXd grid_points(int n_int) {
  const double h = 1.0 / (n_int + 1);
  return Eigen::VectorXd::LinSpaced(n_int, h, n_int * h);
}

TridiagonalOperator generator_matrix(GeneratorKind kind, int n_int) {
  if (n_int < 3) throw std::invalid_argument("generator_matrix: n_int must be >= 3");
  const double h = 1.0 / (n_int + 1);
  TridiagonalOperator op;
  switch (kind) {
    case GeneratorKind::laplacian:
      op.diag = Eigen::VectorXd::Constant(n_int, -2.0 / (h * h));
      op.lower = Eigen::VectorXd::Constant(n_int - 1, 1.0 / (h * h));
      op.upper = Eigen::VectorXd::Constant(n_int - 1, 1.0 / (h * h));
      break;
    case GeneratorKind::transport_upwind:
      op.diag = Eigen::VectorXd::Constant(n_int, -1.0 / h);
      op.lower = Eigen::VectorXd::Zero(n_int - 1);
      op.upper = Eigen::VectorXd::Constant(n_int - 1, 1.0 / h);
      break;
  }
  return op;
}

GridFunction sample_initial(InitialData kind, int n_int) {
  const Eigen::VectorXd u = grid_points(n_int);
  if (kind == InitialData::sine)
    return (std::numbers::pi * u.array()).sin();
  GridFunction x(n_int);
  for (int i = 0; i < n_int; ++i) {
    const double dist = std::abs(u(i) - 0.5);
    if (dist == 0.0) {
      std::cerr << "warning: grid node at u=1/2 hits the singular point of the "
                   "irregular initial profile; using 0 there\n";
      x(i) = 0.0;
    } else {
      x(i) = 0.5 * std::sqrt((1.0 - 2.0 * dist) / std::sqrt(dist));
    }
  }
  return x;
}

std::pair<SpdeModel, GridFunction> build_model(const ModelSpec& spec) {
  if (spec.n_int < 3) throw std::invalid_argument("build_model: n_int must be >= 3");
  SpdeModel model;
  model.n_int = spec.n_int;
  model.h = 1.0 / (spec.n_int + 1);
  model.observable = phi_functional;

  const Eigen::VectorXd u = grid_points(spec.n_int);
  switch (spec.name) {
    case ModelKind::ou: {
      model.generator = generator_matrix(GeneratorKind::laplacian, spec.n_int);
      const GridFunction phi = (spec.phi_mode * std::numbers::pi * u.array()).sin();
      model.volatility.push_back([phi](const GridFunction&) { return phi; });
      model.volatility_correction.push_back(
          [n = spec.n_int](const GridFunction&) { return GridFunction::Zero(n); });
      break;
    }
    case ModelKind::nemytskii:
    case ModelKind::transport: {
      model.generator = generator_matrix(spec.name == ModelKind::nemytskii
                                             ? GeneratorKind::laplacian
                                             : GeneratorKind::transport_upwind,
                                         spec.n_int);
      model.volatility.push_back(
          [](const GridFunction& x) -> GridFunction { return x.array().sin(); });
      model.volatility_correction.push_back([](const GridFunction& x) -> GridFunction {
        return x.array().cos() * x.array().sin();
      });
      break;
    }
  }
  return {std::move(model), sample_initial(spec.initial, spec.n_int)};
}

GridFunction stratonovich_correction(const SpdeModel& model, const GridFunction& x) {
  if (x.size() != model.n_int)
    throw std::invalid_argument("stratonovich_correction: grid size mismatch");
  GridFunction out = model.generator.apply(x);
  if (model.drift) out += model.drift(x);
  for (const auto& correction : model.volatility_correction) out -= 0.5 * correction(x);
  return out;
}

double phi_functional(const GridFunction& x) {
  const double h = 1.0 / (static_cast<double>(x.size()) + 1.0);
  return h * x.sum();
}

}  // namespace cubature
