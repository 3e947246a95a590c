// Acceptance suite: one line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cubature/experiments.hpp"
#include "cubature/jumps.hpp"
#include "cubature/models.hpp"
#include "cubature/paths.hpp"
#include "cubature/pde.hpp"
#include "cubature/tree.hpp"
#include "cubature/words.hpp"
#include "oracles.hpp"

using namespace cubature;

namespace {

constexpr double pi = std::numbers::pi;
constexpr int kThreads = 2;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.3g", v);
  return buffer;
}

// --- 1. moment conditions -------------------------------------------------
Outcome criterion_moment_conditions() {
  Outcome out;
  for (int d : {1, 2, 3}) {
    const CubatureReport report = verify_cubature(standard_formula(d), 1e-12);
    out.require(report.all_pass, "d=" + std::to_string(d) + " max error " +
                                     fmt(report.max_abs_error));
  }
  return out;
}

// --- 2. expectation oracle ------------------------------------------------
Outcome criterion_expectation_oracle() {
  Outcome out;
  const auto mc = oracles::mc_iterated_integral_moments(2, 5, 100000, 1000, 20240901, kThreads);
  int checked = 0;
  for (std::size_t i = 0; i < mc.words.size(); ++i) {
    const double exact = expected_stratonovich(mc.words[i], 1.0);
    const double gap = std::abs(mc.mean[i] - exact);
    const double tol = 4.0 * mc.std_error[i] + 1e-12;
    ++checked;
    if (gap > tol)
      out.require(false, "word " + to_string(mc.words[i]) + " off by " + fmt(gap) +
                             " vs tol " + fmt(tol));
  }
  out.detail = std::to_string(checked) + " words checked" +
               (out.detail.empty() ? "" : "; " + out.detail);
  return out;
}

// --- 3. OU exactness --------------------------------------------------------
Outcome criterion_ou_exactness() {
  Outcome out;
  auto [model, x0] = build_model({ModelKind::ou, 50, InitialData::sine, 1});
  const CubatureFormula& formula = formula_for_degree(1, 3);
  const double exact = 2.0 * std::exp(-pi * pi) / pi;
  TreeOptions opts{std::int64_t{1} << 16, kThreads};
  double lo = 1e30, hi = -1e30;
  for (int p = 1; p <= 6; ++p) {
    SolverConfig cfg{default_steps_per_interval(p), 0.5};
    const TreeEstimate est =
        evaluate_full(model, x0, model.observable, formula, uniform_partition(1.0, p), cfg, opts);
    out.require(std::abs(est.value - exact) <= 5e-7,
                "p=" + std::to_string(p) + " error " + fmt(est.value - exact));
    lo = std::min(lo, est.value);
    hi = std::max(hi, est.value);
  }
  out.require(hi - lo <= 1e-7, "p-spread " + fmt(hi - lo));
  if (out.pass) out.detail = "max |error| " + fmt(std::max(std::abs(lo - exact), std::abs(hi - exact))) +
                             ", spread " + fmt(hi - lo);
  return out;
}

// --- 4. Nemytskii convergence ----------------------------------------------
Outcome criterion_nemytskii_convergence() {
  Outcome out;
  ExperimentConfig config = default_config("nemytskii");
  config.threads = kThreads;
  const ConvergenceReport report = run_experiment(config);
  double previous = 1e30;
  for (const auto& row : report.rows) {
    out.require(!row.failure, "row failed");
    out.require(std::abs(row.error) < previous,
                "p=" + std::to_string(row.p) + " not strictly decreasing");
    previous = std::abs(row.error);
  }
  out.require(previous <= 2e-6, "final |error| " + fmt(previous));
  out.require(report.fit.geometric_ratio.has_value(), "no ratio fitted");
  if (report.fit.geometric_ratio) {
    const double ratio = *report.fit.geometric_ratio;
    out.require(ratio > 0.45 && ratio < 0.80, "ratio " + fmt(ratio) + " outside (0.45,0.80)");
    if (out.pass)
      out.detail = "final |error| " + fmt(previous) + ", ratio " + fmt(ratio);
  }
  return out;
}

// --- 5. Monte-Carlo on the tree ----------------------------------------------
Outcome criterion_mc_on_tree() {
  Outcome out;
  TreeOptions opts{std::int64_t{1} << 16, kThreads};

  // (a) empirical leaf sd at p=10 vs the closed form 0.1433
  auto [ou, x0] = build_model({ModelKind::ou, 50, InitialData::sine, 1});
  const CubatureFormula& formula = formula_for_degree(1, 3);
  {
    const auto partition = uniform_partition(1.0, 10);
    SolverConfig cfg{default_steps_per_interval(10), 0.5};
    const auto values = mc_leaf_samples(ou, x0, ou.observable, formula, partition, cfg,
                                        4000, 515, opts);
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    const double target = reference_values().ou_sd;
    out.require(std::abs(sd - target) <= 0.2 * target,
                "leaf sd " + fmt(sd) + " vs " + fmt(target));
    if (out.pass) out.detail = "leaf sd " + fmt(sd);
  }

  // (b) quadrupling the samples halves the statistical error (+-15%)
  {
    const auto partition = uniform_partition(1.0, 4);
    SolverConfig cfg{default_steps_per_interval(4), 0.5};
    double ratio_sum = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const TreeEstimate small = evaluate_mc(ou, x0, ou.observable, formula, partition,
                                             cfg, 500, 1000 + seed, opts);
      const TreeEstimate large = evaluate_mc(ou, x0, ou.observable, formula, partition,
                                             cfg, 2000, 2000 + seed, opts);
      ratio_sum += *small.std_error / *large.std_error;
    }
    const double mean_ratio = ratio_sum / 10.0;
    out.require(mean_ratio >= 1.7 && mean_ratio <= 2.3,
                "stderr ratio " + fmt(mean_ratio) + " outside 2 +- 15%");
    out.detail += (out.detail.empty() ? "" : ", ") + ("stderr ratio " + fmt(mean_ratio));
  }

  // (c) nemytskii: MC agrees with the full tree within 4 stderr
  {
    auto [nem, y0] = build_model({ModelKind::nemytskii, 50, InitialData::sine, 1});
    const auto partition = uniform_partition(1.0, 6);
    SolverConfig cfg{default_steps_per_interval(6), 0.5};
    const TreeEstimate full =
        evaluate_full(nem, y0, nem.observable, formula, partition, cfg, opts);
    const TreeEstimate mc = evaluate_mc(nem, y0, nem.observable, formula, partition, cfg,
                                        10000, 99, opts);
    const double gap = std::abs(mc.value - full.value);
    out.require(gap <= 4.0 * *mc.std_error,
                "mc-full gap " + fmt(gap) + " vs 4 stderr " + fmt(4.0 * *mc.std_error));
    out.detail += (out.detail.empty() ? "" : ", ") +
                  ("mc gap " + fmt(gap) + " <= " + fmt(4.0 * *mc.std_error));
  }
  return out;
}

// --- 6. jump oracle -----------------------------------------------------------
Outcome criterion_jump_oracle() {
  Outcome out;
  SpdeModel model;
  model.n_int = 1;
  model.h = 0.5;
  model.generator.diag = Eigen::VectorXd::Zero(1);
  model.generator.lower = Eigen::VectorXd::Zero(0);
  model.generator.upper = Eigen::VectorXd::Zero(0);
  model.volatility.push_back([](const GridFunction& x) { return GridFunction::Zero(x.size()); });
  model.volatility_correction.push_back(
      [](const GridFunction& x) { return GridFunction::Zero(x.size()); });
  model.jump_fields.push_back([](const GridFunction& x) { return x; });
  model.observable = [](const GridFunction& x) { return x(0); };

  const JumpSpec spec{{1.0}, {0.5}};
  GridFunction x0 = GridFunction::Ones(1);
  SolverConfig cfg{50, 0.5};

  const double t = 0.1;
  const TreeEstimate est =
      evaluate_jump_expectation(model, x0, model.observable, spec, 5, t, 200, 7, cfg);
  double series = 0.0;
  for (int n = 0; n <= 2; ++n) series += poisson_weight(n, 1.0, t) * std::pow(1.5, n);
  const double gap = std::abs(est.value - series);
  out.require(gap <= 3.0 * *est.std_error + 1e-12,
              "series gap " + fmt(gap) + " vs " + fmt(3.0 * *est.std_error + 1e-12));

  const double exact = std::exp(0.05);
  const double tilted_tail = std::exp(1.0 * t * 0.5) * std::pow(1.0 * t * 1.5, 3) / 6.0;
  out.require(std::abs(est.value - exact) <= tilted_tail,
              "deviation " + fmt(std::abs(est.value - exact)) + " above excluded-mass bound " +
                  fmt(tilted_tail));

  std::vector<double> ts{0.4, 0.2, 0.1, 0.05}, errs;
  for (double ti : ts) {
    const TreeEstimate e =
        evaluate_jump_expectation(model, x0, model.observable, spec, 5, ti, 50, 7, cfg);
    errs.push_back(std::abs(e.value - std::exp(0.5 * ti)));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double lx = std::log(ts[i]), ly = std::log(errs[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(ts.size());
  const double order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  out.require(order >= 1.5, "t-order " + fmt(order) + " below 1.5");
  if (out.pass)
    out.detail = "series gap " + fmt(gap) + ", deviation " + fmt(std::abs(est.value - exact)) +
                 " <= " + fmt(tilted_tail) + ", t-order " + fmt(order);
  return out;
}

// --- 7. irregular data ---------------------------------------------------------
Outcome criterion_irregular_data() {
  Outcome out;
  ExperimentConfig config = default_config("irregular");
  config.threads = kThreads;
  const ConvergenceReport report = run_experiment(config);
  const ReportRow& last = report.rows.back();
  out.require(!last.failure.has_value(), "final row failed");
  out.require(std::abs(last.error) <= 2e-6,
              "p=8 error " + fmt(last.error) + " above 2e-6");
  const double reference = last.reference;
  out.require(std::abs(0.3002e-4 - reference) <= 0.05 * reference,
              "published 3.002e-5 not within 5% of internal reference " + fmt(reference));
  if (out.pass)
    out.detail = "p=8 error " + fmt(last.error) + ", internal reference " + fmt(reference);
  return out;
}

// --- 8. determinism and parallel consistency -------------------------------------
Outcome criterion_determinism() {
  Outcome out;
  ExperimentConfig config = default_config("nemytskii");
  config.model.n_int = 30;
  config.p_values = {2, 3};
  config.mode = RunMode::mc;
  config.samples = 200;
  config.seed = 424242;
  config.steps_budget = 100;

  std::vector<std::string> outputs;
  for (int threads : {1, 2, 3}) {
    config.threads = threads;
    std::ostringstream csv;
    write_csv(run_experiment(config), csv);
    outputs.push_back(csv.str());
  }
  config.threads = 1;
  std::ostringstream rerun;
  write_csv(run_experiment(config), rerun);
  outputs.push_back(rerun.str());

  for (std::size_t i = 1; i < outputs.size(); ++i)
    out.require(outputs[i] == outputs.front(), "CSV bytes differ across runs/threads");
  if (out.pass) out.detail = "4 runs, threads {1,2,3,1}, identical CSV bytes";
  return out;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> criteria{
      {1, "moment conditions (degree 3, d=1,2,3)", criterion_moment_conditions},
      {2, "iterated-integral expectations vs path simulation", criterion_expectation_oracle},
      {3, "ou tree value exact and p-invariant", criterion_ou_exactness},
      {4, "nemytskii error decay", criterion_nemytskii_convergence},
      {5, "monte-carlo on the tree", criterion_mc_on_tree},
      {6, "scalar jump-diffusion oracle", criterion_jump_oracle},
      {7, "irregular initial data vs heat reference", criterion_irregular_data},
      {8, "seeded determinism across thread counts", criterion_determinism},
  };

  int failures = 0;
  for (const auto& entry : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = entry.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double seconds = elapsed_since(start);
    std::printf("[%s] %d. %s (%.1fs)%s%s\n", outcome.pass ? "PASS" : "FAIL", entry.id,
                entry.name, seconds, outcome.detail.empty() ? "" : " -- ",
                outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  if (failures == 0)
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures;
}
