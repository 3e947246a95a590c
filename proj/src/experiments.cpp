#include "cubature/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cubature/rng.hpp"

namespace cubature {

using json = nlohmann::json;

ReferenceValues reference_values() {
  const double pi = std::numbers::pi;
  ReferenceValues v;
  v.sine_mean = 2.0 * std::exp(-pi * pi) / pi;
  v.ou_sd = std::sqrt(2.0 / (pi * pi * pi * pi) * (1.0 - std::exp(-2.0 * pi * pi)));
  return v;
}

double heat_reference(const ModelSpec& spec, double horizon, int steps) {
  auto [model, x0] = build_model(spec);
  PiecewiseLinearPath zero_path;
  zero_path.knots = Eigen::VectorXd::LinSpaced(2, 0.0, horizon);
  zero_path.values = Eigen::MatrixXd::Zero(model.brownian_dimension() + 1, 2);
  zero_path.values(0, 1) = horizon;
  SolverConfig cfg;
  cfg.steps_per_interval = steps;
  cfg.theta = 0.5;
  // Zero slope drops the volatility forcing; the Stratonovich correction of
  // the Nemytskii field would not (it is state-dependent), so solve with the
  // bare generator: the Ito mean obeys m' = A m exactly for alpha = 0.
  SpdeModel heat = model;
  heat.volatility_correction.clear();
  heat.volatility.clear();
  return model.observable(solve_along_path(heat, x0, zero_path, cfg));
}

ConvergenceFit fit_convergence(const std::vector<std::pair<int, double>>& errors) {
  ConvergenceFit fit;
  std::vector<std::pair<int, double>> usable;
  for (const auto& [p, e] : errors) {
    if (e == 0.0) {
      fit.notes.push_back("p=" + std::to_string(p) + " excluded from fits (zero error)");
      continue;
    }
    usable.emplace_back(p, std::abs(e));
  }
  std::sort(usable.begin(), usable.end());
  if (usable.size() < 3) {
    fit.notes.push_back("fewer than 3 rows with nonzero error; fits skipped");
    return fit;
  }
  double log_ratio_sum = 0.0;
  for (std::size_t i = 0; i + 1 < usable.size(); ++i)
    log_ratio_sum += std::log(usable[i + 1].second / usable[i].second);
  fit.geometric_ratio = std::exp(log_ratio_sum / static_cast<double>(usable.size() - 1));

  // Least squares for log|e| = order * log p + c.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [p, e] : usable) {
    const double x = std::log(static_cast<double>(p));
    const double y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(usable.size());
  fit.algebraic_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

std::vector<std::string> experiment_names() {
  return {"ou", "nemytskii", "transport", "irregular", "mc-on-tree", "jump-demo"};
}

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "ou") {
    c.model = {ModelKind::ou, 50, InitialData::sine, 1};
    c.p_values = {1, 2, 3, 4, 5, 6};
  } else if (experiment == "nemytskii") {
    c.model = {ModelKind::nemytskii, 50, InitialData::sine, 1};
    c.p_values = {1, 2, 3, 4, 5, 6, 7, 8};
  } else if (experiment == "transport") {
    c.model = {ModelKind::transport, 200, InitialData::sine, 1};
    c.p_values = {1, 2, 3, 4, 5, 6};
  } else if (experiment == "irregular") {
    c.model = {ModelKind::nemytskii, 200, InitialData::irregular, 1};
    c.p_values = {1, 2, 3, 4, 5, 6, 7, 8};
  } else if (experiment == "mc-on-tree") {
    c.model = {ModelKind::nemytskii, 50, InitialData::sine, 1};
    c.p_values = {5, 10, 15, 20, 25, 30};
    c.mode = RunMode::mc;
    c.samples = 1000;
  } else if (experiment == "jump-demo") {
    // rows iterate over jump_degrees; the model is the built-in scalar one
  } else {
    throw std::invalid_argument("unknown experiment: " + experiment);
  }
  return c;
}

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

/// dX = X_{t-} dL for a compound Poisson L: A = 0, no diffusion, delta(x) = x,
/// observable the single state entry. Carried as a 1-point grid model.
SpdeModel scalar_jump_model() {
  SpdeModel m;
  m.n_int = 1;
  m.h = 0.5;
  m.generator.diag = Eigen::VectorXd::Zero(1);
  m.generator.lower = Eigen::VectorXd::Zero(0);
  m.generator.upper = Eigen::VectorXd::Zero(0);
  m.volatility.push_back([](const GridFunction& x) { return GridFunction::Zero(x.size()); });
  m.volatility_correction.push_back(
      [](const GridFunction& x) { return GridFunction::Zero(x.size()); });
  m.jump_fields.push_back([](const GridFunction& x) { return x; });
  m.observable = [](const GridFunction& x) { return x(0); };
  return m;
}

ReportRow jump_demo_row(const ExperimentConfig& config, int degree) {
  const SpdeModel model = scalar_jump_model();
  const JumpSpec spec{{config.jump_rate}, {config.jump_size}};
  const double t_total = config.jump_horizon;
  const int macro = std::max(1, config.jump_macro_steps);
  const double dt = t_total / macro;

  SolverConfig cfg;
  cfg.theta = config.theta;
  cfg.steps_per_interval = default_steps_per_interval(1, config.steps_budget);
  TreeOptions opts;
  opts.threads = config.threads;
  opts.leaf_cap = config.leaf_cap;

  GridFunction x0(1);
  x0(0) = config.jump_x0;

  ReportRow row;
  row.p = degree;
  const double start = now_seconds();
  // State-linear model: E[X_{t+dt} | X_t = x] = x * factor(dt), so macro
  // steps compose multiplicatively on the factors.
  double value = config.jump_x0;
  double rel_var = 0.0;
  double kept_mass = 1.0;
  std::int64_t conditionals = 0;
  GridFunction unit(1);
  unit(0) = 1.0;
  for (int k = 0; k < macro; ++k) {
    const TreeEstimate step = evaluate_jump_expectation(
        model, unit, model.observable, spec, degree, dt, config.jump_mc_scenarios,
        derive_seed(config.seed, static_cast<std::uint64_t>(k)), cfg, opts);
    value *= step.value;
    conditionals += step.leaf_count;
    if (step.std_error && step.value != 0.0) {
      const double rel = *step.std_error / std::abs(step.value);
      rel_var += rel * rel;
    }
    if (step.truncation_mass) kept_mass *= 1.0 - *step.truncation_mass;
  }
  row.runtime_seconds = now_seconds() - start;
  row.estimate = value;
  row.leaves = conditionals;
  row.std_error = std::abs(value) * std::sqrt(rel_var);
  row.truncation_mass = 1.0 - kept_mass;
  row.reference =
      config.jump_x0 * std::exp(config.jump_rate * t_total * config.jump_size);
  row.error = row.estimate - row.reference;
  return row;
}

}  // namespace

ConvergenceReport run_experiment(const ExperimentConfig& config) {
  if (config.experiment != "jump-demo" && config.p_values.empty())
    throw std::invalid_argument("run_experiment: p range must be nonempty");
  if (config.mode == RunMode::mc && config.samples < 2)
    throw std::invalid_argument("run_experiment: mc mode needs samples >= 2");

  ConvergenceReport report;
  report.config = config;

  if (config.experiment == "jump-demo") {
    for (int degree : config.jump_degrees) report.rows.push_back(jump_demo_row(config, degree));
    std::vector<std::pair<int, double>> errors;
    for (const auto& row : report.rows) errors.emplace_back(row.p, row.error);
    report.fit = fit_convergence(errors);
    return report;
  }

  auto [model, x0] = build_model(config.model);
  const CubatureFormula& formula =
      formula_for_degree(model.brownian_dimension(), config.degree);

  double reference = 0.0;
  const int fine_steps = static_cast<int>(std::lround(config.horizon / 1e-4));
  if (config.model.initial == InitialData::irregular) {
    // Internally recomputed heat reference on the pinned fine grid.
    ModelSpec ref_spec = config.model;
    ref_spec.n_int = 200;
    reference = heat_reference(ref_spec, config.horizon, fine_steps);
  } else if (config.model.name == ModelKind::transport) {
    reference = heat_reference(config.model, config.horizon, fine_steps);
  } else {
    reference = reference_values().sine_mean;
  }

  TreeOptions opts;
  opts.threads = config.threads;
  opts.leaf_cap = config.leaf_cap;

  for (int p : config.p_values) {
    ReportRow row;
    row.p = p;
    row.reference = reference;
    const std::vector<double> partition = uniform_partition(config.horizon, p);
    SolverConfig cfg;
    cfg.theta = config.theta;
    cfg.steps_per_interval = default_steps_per_interval(p, config.steps_budget);
    const double start = now_seconds();
    try {
      TreeEstimate estimate =
          config.mode == RunMode::full
              ? evaluate_full(model, x0, model.observable, formula, partition, cfg, opts)
              : evaluate_mc(model, x0, model.observable, formula, partition, cfg,
                            config.samples, derive_seed(config.seed, p), opts);
      row.estimate = estimate.value;
      row.leaves = estimate.leaf_count;
      row.error = estimate.value - reference;
      row.std_error = estimate.std_error;
    } catch (const BudgetExceeded& e) {
      row.failure = e.what();
    } catch (const NumericalBlowup& e) {
      row.failure = e.what();
    }
    row.runtime_seconds = now_seconds() - start;
    report.rows.push_back(std::move(row));
  }

  std::vector<std::pair<int, double>> errors;
  for (const auto& row : report.rows)
    if (!row.failure) errors.emplace_back(row.p, row.error);
  report.fit = fit_convergence(errors);
  return report;
}

namespace {

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

}  // namespace

void write_csv(const ConvergenceReport& report, std::ostream& os) {
  const bool with_truncation = std::any_of(
      report.rows.begin(), report.rows.end(),
      [](const ReportRow& r) { return r.truncation_mass.has_value(); });
  os << "p,leaves,estimate,reference,error,stderr,";
  if (with_truncation) os << "truncation_mass,";
  os << "runtime_s\n";
  for (const auto& row : report.rows) {
    os << row.p << "," << row.leaves << ",";
    if (!row.failure) {
      os << format_double(row.estimate) << "," << format_double(row.reference) << ","
         << format_double(row.error) << ",";
    } else {
      os << ",,,";
    }
    if (row.std_error) os << format_double(*row.std_error);
    os << ",";
    if (with_truncation) {
      if (row.truncation_mass) os << format_double(*row.truncation_mass);
      os << ",";
    }
    if (report.config.csv_runtime) os << format_double(row.runtime_seconds);
    os << "\n";
  }
}

namespace {

json config_to_json(const ExperimentConfig& c) {
  const char* model_name = c.model.name == ModelKind::ou          ? "ou"
                           : c.model.name == ModelKind::nemytskii ? "nemytskii"
                                                                  : "transport";
  return json{
      {"experiment", c.experiment},
      {"model", model_name},
      {"n_int", c.model.n_int},
      {"initial", c.model.initial == InitialData::sine ? "sine" : "irregular"},
      {"phi_mode", c.model.phi_mode},
      {"degree", c.degree},
      {"p_values", c.p_values},
      {"horizon", c.horizon},
      {"theta", c.theta},
      {"steps_budget", c.steps_budget},
      {"mode", c.mode == RunMode::full ? "full" : "mc"},
      {"samples", c.samples},
      {"seed", c.seed},
      {"threads", c.threads},
      {"leaf_cap", c.leaf_cap},
      {"out_dir", c.out_dir},
      {"csv_runtime", c.csv_runtime},
      {"jump_rate", c.jump_rate},
      {"jump_size", c.jump_size},
      {"jump_horizon", c.jump_horizon},
      {"jump_x0", c.jump_x0},
      {"jump_mc_scenarios", c.jump_mc_scenarios},
      {"jump_macro_steps", c.jump_macro_steps},
      {"jump_degrees", c.jump_degrees},
  };
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.experiment = j.at("experiment").get<std::string>();
  c.model.name = model_kind_from_string(j.at("model").get<std::string>());
  c.model.n_int = j.at("n_int").get<int>();
  c.model.initial = initial_from_string(j.at("initial").get<std::string>());
  c.model.phi_mode = j.at("phi_mode").get<int>();
  c.degree = j.at("degree").get<int>();
  c.p_values = j.at("p_values").get<std::vector<int>>();
  c.horizon = j.at("horizon").get<double>();
  c.theta = j.at("theta").get<double>();
  c.steps_budget = j.at("steps_budget").get<int>();
  c.mode = j.at("mode").get<std::string>() == "full" ? RunMode::full : RunMode::mc;
  c.samples = j.at("samples").get<std::int64_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.threads = j.at("threads").get<int>();
  c.leaf_cap = j.at("leaf_cap").get<std::int64_t>();
  c.out_dir = j.at("out_dir").get<std::string>();
  c.csv_runtime = j.at("csv_runtime").get<bool>();
  c.jump_rate = j.at("jump_rate").get<double>();
  c.jump_size = j.at("jump_size").get<double>();
  c.jump_horizon = j.at("jump_horizon").get<double>();
  c.jump_x0 = j.at("jump_x0").get<double>();
  c.jump_mc_scenarios = j.at("jump_mc_scenarios").get<int>();
  c.jump_macro_steps = j.at("jump_macro_steps").get<int>();
  c.jump_degrees = j.at("jump_degrees").get<std::vector<int>>();
  return c;
}

}  // namespace

void write_json(const ConvergenceReport& report, std::ostream& os) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    json r{{"p", row.p},
           {"leaves", row.leaves},
           {"estimate", row.estimate},
           {"reference", row.reference},
           {"error", row.error},
           {"runtime_seconds", row.runtime_seconds}};
    r["stderr"] = row.std_error ? json(*row.std_error) : json(nullptr);
    r["truncation_mass"] = row.truncation_mass ? json(*row.truncation_mass) : json(nullptr);
    r["failure"] = row.failure ? json(*row.failure) : json(nullptr);
    rows.push_back(std::move(r));
  }
  json fit;
  fit["geometric_ratio"] =
      report.fit.geometric_ratio ? json(*report.fit.geometric_ratio) : json(nullptr);
  fit["algebraic_order"] =
      report.fit.algebraic_order ? json(*report.fit.algebraic_order) : json(nullptr);
  fit["notes"] = report.fit.notes;
  const json doc{{"version", kVersion},
                 {"config", config_to_json(report.config)},
                 {"fit", fit},
                 {"rows", rows}};
  os << doc.dump(2) << "\n";
}

ConvergenceReport read_json(std::istream& is) {
  json doc = json::parse(is);
  ConvergenceReport report;
  report.config = config_from_json(doc.at("config"));
  const json& fit = doc.at("fit");
  if (!fit.at("geometric_ratio").is_null())
    report.fit.geometric_ratio = fit.at("geometric_ratio").get<double>();
  if (!fit.at("algebraic_order").is_null())
    report.fit.algebraic_order = fit.at("algebraic_order").get<double>();
  report.fit.notes = fit.at("notes").get<std::vector<std::string>>();
  for (const json& r : doc.at("rows")) {
    ReportRow row;
    row.p = r.at("p").get<int>();
    row.leaves = r.at("leaves").get<std::int64_t>();
    row.estimate = r.at("estimate").get<double>();
    row.reference = r.at("reference").get<double>();
    row.error = r.at("error").get<double>();
    row.runtime_seconds = r.at("runtime_seconds").get<double>();
    if (!r.at("stderr").is_null()) row.std_error = r.at("stderr").get<double>();
    if (!r.at("truncation_mass").is_null())
      row.truncation_mass = r.at("truncation_mass").get<double>();
    if (!r.at("failure").is_null()) row.failure = r.at("failure").get<std::string>();
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<int> parse_int_list(const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

bool parse_bool(const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("config: expected a boolean, got '" + value + "'");
}

}  // namespace

void apply_config_line(ExperimentConfig& config, const std::string& key,
                       const std::string& value) {
  if (key == "experiment") config.experiment = value;
  else if (key == "model") config.model.name = model_kind_from_string(value);
  else if (key == "n_int") config.model.n_int = std::stoi(value);
  else if (key == "initial") config.model.initial = initial_from_string(value);
  else if (key == "phi_mode") config.model.phi_mode = std::stoi(value);
  else if (key == "degree") config.degree = std::stoi(value);
  else if (key == "p_list") config.p_values = parse_int_list(value);
  else if (key == "p_min" || key == "p_max") {
    int lo = config.p_values.empty() ? 1 : config.p_values.front();
    int hi = config.p_values.empty() ? 1 : config.p_values.back();
    (key == "p_min" ? lo : hi) = std::stoi(value);
    config.p_values.clear();
    for (int p = lo; p <= hi; ++p) config.p_values.push_back(p);
  } else if (key == "horizon") config.horizon = std::stod(value);
  else if (key == "theta") config.theta = std::stod(value);
  else if (key == "steps_budget") config.steps_budget = std::stoi(value);
  else if (key == "mode") {
    if (value == "full") config.mode = RunMode::full;
    else if (value == "mc") config.mode = RunMode::mc;
    else throw std::invalid_argument("config: mode must be 'full' or 'mc'");
  } else if (key == "samples") config.samples = std::stoll(value);
  else if (key == "seed") config.seed = std::stoull(value);
  else if (key == "threads") config.threads = std::stoi(value);
  else if (key == "leaf_cap") config.leaf_cap = std::stoll(value);
  else if (key == "out_dir") config.out_dir = value;
  else if (key == "csv_runtime") config.csv_runtime = parse_bool(value);
  else if (key == "jump_rate") config.jump_rate = std::stod(value);
  else if (key == "jump_size") config.jump_size = std::stod(value);
  else if (key == "jump_horizon") config.jump_horizon = std::stod(value);
  else if (key == "jump_x0") config.jump_x0 = std::stod(value);
  else if (key == "jump_mc_scenarios") config.jump_mc_scenarios = std::stoi(value);
  else if (key == "jump_macro_steps") config.jump_macro_steps = std::stoi(value);
  else if (key == "jump_degrees") config.jump_degrees = parse_int_list(value);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config_file(const std::string& path,
                                   const std::string& fallback_experiment,
                                   const std::string& forced_experiment) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not of the form key = value");
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  // The experiment key selects the defaults, wherever it appears.
  std::string experiment = fallback_experiment;
  for (const auto& [key, value] : entries)
    if (key == "experiment") experiment = value;
  if (!forced_experiment.empty()) experiment = forced_experiment;
  ExperimentConfig config = default_config(experiment);
  for (const auto& [key, value] : entries)
    if (key != "experiment") apply_config_line(config, key, value);
  return config;
}

}  // namespace cubature
