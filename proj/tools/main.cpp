#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cubature/experiments.hpp"

namespace {

int run(const cubature::ExperimentConfig& config) {
  using namespace cubature;
  const ConvergenceReport report = run_experiment(config);

  std::filesystem::create_directories(config.out_dir);
  const std::string base = config.out_dir + "/" + config.experiment;
  {
    std::ofstream csv(base + ".csv", std::ios::binary);
    write_csv(report, csv);
  }
  {
    std::ofstream js(base + ".json", std::ios::binary);
    write_json(report, js);
  }

  std::printf("experiment %s (reference %.6g)\n", config.experiment.c_str(),
              report.rows.empty() ? 0.0 : report.rows.front().reference);
  for (const auto& row : report.rows) {
    if (row.failure) {
      std::printf("  p=%-3d  %s\n", row.p, row.failure->c_str());
      continue;
    }
    std::printf("  p=%-3d leaves=%-8lld estimate=% .6e error=% .3e", row.p,
                static_cast<long long>(row.leaves), row.estimate, row.error);
    if (row.std_error) std::printf(" stderr=%.3e", *row.std_error);
    if (row.truncation_mass) std::printf(" truncated=%.3e", *row.truncation_mass);
    std::printf("  (%.2fs)\n", row.runtime_seconds);
  }
  if (report.fit.geometric_ratio)
    std::printf("  geometric ratio %.4f", *report.fit.geometric_ratio);
  if (report.fit.algebraic_order)
    std::printf("  algebraic order %.3f", *report.fit.algebraic_order);
  if (report.fit.geometric_ratio || report.fit.algebraic_order) std::printf("\n");
  for (const auto& note : report.fit.notes) std::printf("  note: %s\n", note.c_str());
  std::printf("wrote %s.csv and %s.json\n", base.c_str(), base.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak approximation of SPDEs by cubature on Wiener space"};

  std::string config_path, experiment, out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  bool list = false;
  int dump_formula_d = 0;

  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--experiment", experiment,
                 "experiment name (ou, nemytskii, transport, irregular, mc-on-tree, jump-demo)");
  app.add_option("--out", out_dir, "output directory for CSV/JSON reports");
  app.add_option("--seed", seed, "RNG seed for Monte-Carlo modes");
  app.add_option("--threads", threads, "worker threads for tree evaluation");
  app.add_flag("--list", list, "list the available experiments");
  app.add_option("--dump-formula", dump_formula_d,
                 "print the degree-3 formula table for dimension d and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list) {
      for (const auto& name : cubature::experiment_names()) std::printf("%s\n", name.c_str());
      return 0;
    }
    if (dump_formula_d > 0) {
      cubature::write_formula(std::cout, cubature::standard_formula(dump_formula_d));
      return 0;
    }

    cubature::ExperimentConfig config;
    if (!config_path.empty()) {
      config = cubature::parse_config_file(config_path, "ou", experiment);
    } else {
      config = cubature::default_config(experiment.empty() ? "ou" : experiment);
    }
    if (app.count("--seed")) config.seed = seed;
    if (app.count("--threads")) config.threads = threads;
    if (!out_dir.empty()) config.out_dir = out_dir;
    return run(config);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
