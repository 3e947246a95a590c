#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cubature/jumps.hpp"
#include "cubature/models.hpp"
#include "cubature/pde.hpp"
#include "cubature/tree.hpp"

namespace cubature {

inline constexpr const char* kVersion = "0.1.0";

enum class RunMode { full, mc };

/// One experiment run: model choice, cubature degree, partition sizes,
/// solver budget, evaluation mode and output policy. Parsed from
/// "key = value" config files; see parse_config_file.
struct ExperimentConfig {
  std::string experiment = "ou";
  ModelSpec model;
  int degree = 3;
  std::vector<int> p_values{1, 2, 3, 4, 5, 6};
  double horizon = 1.0;
  double theta = 0.5;
  int steps_budget = 500;  // total time steps, split over the p intervals
  RunMode mode = RunMode::full;
  std::int64_t samples = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  std::int64_t leaf_cap = std::int64_t{1} << 16;
  std::string out_dir = ".";
  bool csv_runtime = false;  // measured runtimes in CSV (JSON always has them)

  // jump-demo settings: scalar model dX = X_{t-} dL with point-mass jumps.
  double jump_rate = 1.0;
  double jump_size = 0.5;
  double jump_horizon = 0.1;
  double jump_x0 = 1.0;
  int jump_mc_scenarios = 2000;
  int jump_macro_steps = 1;  // outer deterministic grid; factors multiply,
                             // exact for this state-linear demo model
  std::vector<int> jump_degrees{1, 3, 5};
};

struct ReportRow {
  int p = 0;  // partition size; the cubature degree m for jump-demo rows
  std::int64_t leaves = 0;
  double estimate = 0;
  double reference = 0;
  double error = 0;  // estimate - reference
  std::optional<double> std_error;
  std::optional<double> truncation_mass;
  double runtime_seconds = 0;
  std::optional<std::string> failure;  // budget errors land here, not as throws
};

struct ConvergenceFit {
  std::optional<double> geometric_ratio;  // exp(mean log |e_{k+1}/e_k|)
  std::optional<double> algebraic_order;  // least-squares slope of log|e| vs log p
  std::vector<std::string> notes;         // e.g. rows excluded for zero error
};

struct ConvergenceReport {
  ExperimentConfig config;
  std::vector<ReportRow> rows;
  ConvergenceFit fit;
};

/// Closed-form anchors for the shipped experiments.
struct ReferenceValues {
  double sine_mean;  // 2 e^{-pi^2} / pi
  double ou_sd;      // sqrt(2/pi^4 (1 - e^{-2 pi^2}))
};
ReferenceValues reference_values();

/// Observable mean of every shipped model is the noise-free evolution:
/// Phi_h(e^{T A_h} x_h), computed by a fine Crank-Nicolson solve
/// (`steps` uniform steps, zero slope). Used as the internally computed
/// reference for the irregular and transport experiments.
double heat_reference(const ModelSpec& spec, double horizon, int steps);

/// Fit of the error decay across partition sizes. Rows with zero error are
/// excluded and noted. Requires >= 3 usable rows for the fits to be set.
ConvergenceFit fit_convergence(const std::vector<std::pair<int, double>>& errors);

/// Named experiments: ou, nemytskii, transport, irregular, mc-on-tree,
/// jump-demo. Returns the defaults run_experiment expects.
ExperimentConfig default_config(const std::string& experiment);
std::vector<std::string> experiment_names();

/// Runs every row of the experiment and fits the decay. Budget overruns
/// surface as per-row failure entries.
ConvergenceReport run_experiment(const ExperimentConfig& config);

/// CSV: header p,leaves,estimate,reference,error,stderr,runtime_s
/// (jump-demo inserts truncation_mass before runtime_s). Empty fields for
/// absent values; runtime_s is empty unless config.csv_runtime is set, so
/// reruns with equal seeds are byte-identical.
void write_csv(const ConvergenceReport& report, std::ostream& os);

/// JSON carries the config echo, library version, fits, notes and every
/// row field including measured runtimes; read_json restores the report.
void write_json(const ConvergenceReport& report, std::ostream& os);
ConvergenceReport read_json(std::istream& is);

/// Plain-text "key = value" config file, '#' comments. Unknown keys throw
/// std::invalid_argument. Applies on top of the defaults for the file's
/// experiment (or the fallback experiment when the file does not name one).
/// A nonempty forced_experiment overrides both (CLI flag beats file).
ExperimentConfig parse_config_file(const std::string& path,
                                   const std::string& fallback_experiment = "ou",
                                   const std::string& forced_experiment = "");
void apply_config_line(ExperimentConfig& config, const std::string& key,
                       const std::string& value);

}  // namespace cubature
