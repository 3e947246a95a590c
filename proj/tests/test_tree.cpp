#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cubature/tree.hpp"

using namespace cubature;

namespace {
constexpr double pi = std::numbers::pi;

Observable phi() { return phi_functional; }
}  // namespace

TEST_CASE("uniform partition") {
  const auto t = uniform_partition(1.0, 4);
  REQUIRE(t.size() == 5);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 1.0);
  CHECK(t[1] == doctest::Approx(0.25));
  CHECK_THROWS_AS(uniform_partition(1.0, 0), std::invalid_argument);
}

TEST_CASE("leaf weights") {
  const CubatureFormula f = standard_formula(1);
  CHECK(leaf_weight(f, {0, 1, 0}) == doctest::Approx(0.125));
  CHECK(leaf_weight(f, {1}) == doctest::Approx(f.weights[1]));
  CHECK_THROWS_AS(leaf_weight(f, {2}), std::invalid_argument);

  double total = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) total += leaf_weight(f, {a, b, c});
  CHECK(total == 1.0);
}

TEST_CASE("constant observable integrates to exactly one") {
  auto [model, x0] = build_model({ModelKind::ou, 10, InitialData::sine, 1});
  const Observable one = [](const GridFunction&) { return 1.0; };
  SolverConfig cfg{10, 0.5};
  for (int d : {1, 2}) {
    CubatureFormula f = standard_formula(d);
    SpdeModel m = model;
    // Pad the volatility lists so the model dimension matches the formula.
    while (m.brownian_dimension() < d) {
      m.volatility.push_back(m.volatility[0]);
      m.volatility_correction.push_back(m.volatility_correction[0]);
    }
    for (int p : {1, 2, 3}) {
      const TreeEstimate est =
          evaluate_full(m, x0, one, f, uniform_partition(1.0, p), cfg);
      CHECK(est.value == 1.0);  // dyadic weights sum without rounding
      CHECK(est.leaf_count == static_cast<std::int64_t>(std::pow(f.size(), p)));
    }
  }
}

TEST_CASE("ou tree value is p-invariant and near the closed form") {
  auto [model, x0] = build_model({ModelKind::ou, 50, InitialData::sine, 1});
  const CubatureFormula f = standard_formula(1);
  const double exact = 2.0 * std::exp(-pi * pi) / pi;
  double first = 0.0;
  for (int p : {1, 2, 3}) {
    SolverConfig cfg{default_steps_per_interval(p), 0.5};
    const TreeEstimate est =
        evaluate_full(model, x0, phi(), f, uniform_partition(1.0, p), cfg);
    CHECK(std::abs(est.value - exact) <= 5e-7);
    if (p == 1) first = est.value;
    CHECK(std::abs(est.value - first) <= 1e-7);
  }
}

TEST_CASE("budget cap raises a dedicated error") {
  auto [model, x0] = build_model({ModelKind::ou, 10, InitialData::sine, 1});
  const CubatureFormula f = standard_formula(1);
  TreeOptions opts;
  opts.leaf_cap = 4;
  CHECK_THROWS_AS(evaluate_full(model, x0, phi(), f, uniform_partition(1.0, 3),
                                SolverConfig{10, 0.5}, opts),
                  BudgetExceeded);
}

TEST_CASE("full evaluation is bitwise identical across thread counts") {
  auto [model, x0] = build_model({ModelKind::nemytskii, 20, InitialData::sine, 1});
  const CubatureFormula f = standard_formula(1);
  SolverConfig cfg{25, 0.5};
  const auto partition = uniform_partition(1.0, 4);
  TreeOptions serial{1 << 16, 1}, parallel{1 << 16, 3};
  const TreeEstimate a = evaluate_full(model, x0, phi(), f, partition, cfg, serial);
  const TreeEstimate b = evaluate_full(model, x0, phi(), f, partition, cfg, parallel);
  CHECK(a.value == b.value);
}

TEST_CASE("mc: single-path formula has zero spread") {
  auto [model, x0] = build_model({ModelKind::nemytskii, 12, InitialData::sine, 1});
  const CubatureFormula trivial = time_only_formula(1);
  SolverConfig cfg{20, 0.5};
  const auto partition = uniform_partition(1.0, 2);
  const TreeEstimate mc =
      evaluate_mc(model, x0, phi(), trivial, partition, cfg, 16, 7);
  const TreeEstimate full = evaluate_full(model, x0, phi(), trivial, partition, cfg);
  CHECK(*mc.std_error == 0.0);
  CHECK(mc.value == full.value);
}

TEST_CASE("mc is deterministic given the seed and thread count free") {
  auto [model, x0] = build_model({ModelKind::nemytskii, 15, InitialData::sine, 1});
  const CubatureFormula f = standard_formula(1);
  SolverConfig cfg{20, 0.5};
  const auto partition = uniform_partition(1.0, 3);
  TreeOptions serial{1 << 16, 1}, parallel{1 << 16, 3};
  const TreeEstimate a = evaluate_mc(model, x0, phi(), f, partition, cfg, 500, 99, serial);
  const TreeEstimate b = evaluate_mc(model, x0, phi(), f, partition, cfg, 500, 99, parallel);
  CHECK(a.value == b.value);
  CHECK(*a.std_error == *b.std_error);

  const TreeEstimate c = evaluate_mc(model, x0, phi(), f, partition, cfg, 500, 100, serial);
  CHECK(a.value != c.value);  // different seed, different draw

  CHECK_THROWS_AS(evaluate_mc(model, x0, phi(), f, partition, cfg, 1, 0), std::invalid_argument);
}

TEST_CASE("mc agrees with the full sum within 4 standard errors") {
  auto [model, x0] = build_model({ModelKind::nemytskii, 20, InitialData::sine, 1});
  const CubatureFormula f = standard_formula(1);
  SolverConfig cfg{default_steps_per_interval(3, 150), 0.5};
  const auto partition = uniform_partition(1.0, 3);
  TreeOptions opts{1 << 16, 2};
  const TreeEstimate full = evaluate_full(model, x0, phi(), f, partition, cfg, opts);
  const TreeEstimate mc =
      evaluate_mc(model, x0, phi(), f, partition, cfg, 4000, 2024, opts);
  CHECK(std::abs(mc.value - full.value) <= 4.0 * *mc.std_error);
}

TEST_CASE("stderr shrinks like the square root of the sample count") {
  auto [model, x0] = build_model({ModelKind::ou, 10, InitialData::sine, 1});
  const CubatureFormula f = standard_formula(1);
  SolverConfig cfg{25, 0.5};
  const auto partition = uniform_partition(1.0, 2);
  TreeOptions opts{1 << 16, 2};
  double ratio_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TreeEstimate small =
        evaluate_mc(model, x0, phi(), f, partition, cfg, 400, seed, opts);
    const TreeEstimate large =
        evaluate_mc(model, x0, phi(), f, partition, cfg, 1600, seed + 1000, opts);
    ratio_sum += *small.std_error / *large.std_error;
  }
  const double mean_ratio = ratio_sum / 10.0;
  CHECK(mean_ratio >= 2.0 * 0.85);
  CHECK(mean_ratio <= 2.0 * 1.15);
}
