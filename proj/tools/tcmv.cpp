// Command-line front end: solve the time-consistent policy, simulate it,
// sweep risk-aversion values, and render reports.
//
// Exit codes: 0 ok, 1 numerical failure (validity check), 2 usage/config/IO.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>

#include "tcmv/artifacts.hpp"
#include "tcmv/config_file.hpp"
#include "tcmv/optimizer.hpp"
#include "tcmv/simulate.hpp"

namespace fs = std::filesystem;
using namespace tcmv;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::string cone;
  std::optional<long> scenarios;
  std::optional<std::uint64_t> seed;
  std::string format = "csv,json";
};

RunConfig load_run_config(const CommonOpts& opts) {
  RunConfig cfg = load_config(opts.config_path);
  if (opts.scenarios) cfg.scenarios = *opts.scenarios;
  if (opts.seed) cfg.seed = *opts.seed;
  if (!opts.cone.empty()) {
    if (opts.cone == "no_shorting")
      cfg.cone = ConeConstraint::no_shorting(cfg.market.assets);
    else if (opts.cone == "none")
      cfg.cone.reset();
    else
      cfg.cone = load_cone_file(opts.cone);
    cfg.validate();
  }
  return cfg;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

SweepRow solve_one(const RunConfig& cfg, const ScenarioSet& sc, double gp, double gm) {
  RiskAversionSpec risk = cfg.risk;
  risk.gamma_plus.setConstant(gp);
  risk.gamma_minus.setConstant(gm);
  SolveOutput solved = backward_solve(cfg.market, risk, cfg.cone, sc, cfg.search);
  SweepRow row;
  row.gamma_plus = gp;
  row.gamma_minus = gm;
  row.policy = std::move(solved.policy);
  row.coeffs = std::move(solved.coeffs);
  return row;
}

int cmd_solve(const CommonOpts& opts) {
  const RunConfig cfg = load_run_config(opts);
  ensure_out_dir(opts.out_dir);
  const ScenarioSet sc = generate_scenarios(cfg.market, cfg.scenarios, cfg.seed);
  const SolveOutput solved = backward_solve(cfg.market, cfg.risk, cfg.cone, sc, cfg.search);

  PolicyMeta meta{cfg.risk.gamma_plus, cfg.risk.gamma_minus, cfg.x0};
  write_policy_json((fs::path(opts.out_dir) / "policy.json").string(), solved.policy, meta);
  write_coefficients_json((fs::path(opts.out_dir) / "coefficients.json").string(), solved.coeffs);
  write_diagnostics_json((fs::path(opts.out_dir) / "diagnostics.json").string(),
                         solved.diagnostics);
  std::cout << "wrote policy.json, coefficients.json, diagnostics.json to " << opts.out_dir
            << '\n';
  return 0;
}

int cmd_simulate(const CommonOpts& opts, const std::string& policy_path,
                 std::optional<long> paths_override, bool in_sample) {
  const RunConfig cfg = load_run_config(opts);
  ensure_out_dir(opts.out_dir);

  const LoadedPolicy loaded = read_policy_json(policy_path);
  if (loaded.policy.assets != cfg.market.assets || loaded.policy.horizon != cfg.market.horizon)
    throw ConfigError("policy file '" + policy_path + "' does not match the configured market");

  const long n_paths = paths_override.value_or(cfg.sim_paths);
  const std::uint64_t sim_seed = cfg.in_sample || in_sample ? cfg.seed : cfg.simulation_seed();

  SimulationResult result;
  if (cfg.in_sample || in_sample) {
    const ScenarioSet sc = generate_scenarios(cfg.market, cfg.scenarios, cfg.seed);
    result = simulate_bootstrap(as_action(loaded.policy), sc, cfg.market.riskfree, cfg.x0,
                                n_paths, sim_seed);
  } else {
    result = simulate(as_action(loaded.policy), cfg.market, cfg.x0, n_paths, sim_seed);
  }

  std::optional<ClosedFormComparison> comparison;
  const fs::path coeff_path = fs::path(policy_path).parent_path() / "coefficients.json";
  if (fs::exists(coeff_path)) {
    const CoefficientTable coeffs = read_coefficients_json(coeff_path.string());
    comparison = compare_closed_form(
        result, closed_form_terminal_moments(loaded.policy, coeffs, cfg.x0));
  }

  // Threshold probabilities on a fresh out-of-sample scenario set.
  std::optional<Eigen::VectorXd> thresholds;
  if (cfg.market.has_moment_model()) {
    const ScenarioSet out_sample = generate_scenarios(cfg.market, n_paths, sim_seed + 1);
    thresholds = threshold_probabilities(loaded.policy, out_sample);
  } else {
    const ScenarioSet raw(cfg.market.raw_scenarios().periods, cfg.seed);
    thresholds = threshold_probabilities(loaded.policy, raw);
  }

  write_summary_json((fs::path(opts.out_dir) / "summary.json").string(), result, cfg.x0,
                     loaded.policy.target, comparison, thresholds);
  write_paths_csv((fs::path(opts.out_dir) / "paths.csv").string(), result);
  write_density_csv((fs::path(opts.out_dir) / "density.csv").string(), result);
  std::cout << "wrote summary.json, paths.csv, density.csv to " << opts.out_dir << '\n';
  return 0;
}

int cmd_sweep(const CommonOpts& opts, const std::string& parameter,
              const std::vector<double>& values, std::optional<long> paths_override) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  if (parameter != "gamma_plus" && parameter != "gamma_minus")
    throw ConfigError("sweep parameter must be gamma_plus or gamma_minus");

  const RunConfig cfg = load_run_config(opts);
  ensure_out_dir(opts.out_dir);
  // One scenario set shared across all values keeps rows comparable.
  const ScenarioSet sc = generate_scenarios(cfg.market, cfg.scenarios, cfg.seed);
  const long n_paths = paths_override.value_or(cfg.sim_paths);

  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (const double v : values) {
    const double gp = parameter == "gamma_plus" ? v : cfg.risk.gamma_plus[0];
    const double gm = parameter == "gamma_minus" ? v : cfg.risk.gamma_minus[0];
    SweepRow row = solve_one(cfg, sc, gp, gm);
    const SimulationResult sim =
        simulate(as_action(row.policy), cfg.market, cfg.x0, n_paths, cfg.simulation_seed());
    row.sharpe = sim.sharpe;
    rows.push_back(std::move(row));
  }

  write_sweep_csv((fs::path(opts.out_dir) / "sweep.csv").string(), rows);
  std::cout << "wrote sweep.csv (" << rows.size() << " rows) to " << opts.out_dir << '\n';
  return 0;
}

int cmd_report(const std::string& artifacts_dir) {
  const auto written = write_report(artifacts_dir);
  for (const auto& p : written) std::cout << "wrote " << p << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-consistent behavioral mean-variance portfolio solver"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string policy_path;
  std::string parameter;
  std::vector<double> values;
  std::optional<long> paths_override;
  bool in_sample = false;
  std::string artifacts_dir;

  auto add_common = [&](CLI::App* cmd, bool config_required = true) {
    auto* c = cmd->add_option("--config", opts.config_path, "run configuration file");
    if (config_required) c->required();
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "scenario seed override");
    cmd->add_option("--scenarios", opts.scenarios, "scenario count override");
    cmd->add_option("--cone", opts.cone, "cone constraint: no_shorting, none, or a file");
    cmd->add_option("--format", opts.format, "output formats (csv,json)");
  };

  auto* solve = app.add_subcommand("solve", "solve the backward induction and write the policy");
  add_common(solve);

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo simulation of a solved policy");
  add_common(simulate_cmd);
  simulate_cmd->add_option("--policy", policy_path, "policy.json from solve")->required();
  simulate_cmd->add_option("--paths", paths_override, "number of Monte Carlo paths");
  simulate_cmd->add_flag("--in-sample", in_sample, "bootstrap the solving scenarios instead");

  auto* sweep = app.add_subcommand("sweep", "solve across a list of risk-aversion values");
  add_common(sweep);
  sweep->add_option("--param", parameter, "gamma_plus or gamma_minus")->required();
  sweep->add_option("--values", values, "comma separated list")->required()->delimiter(',');
  sweep->add_option("--paths", paths_override, "paths for the Sharpe column");

  auto* report = app.add_subcommand("report", "render tables from solve/sweep artifacts");
  report->add_option("--artifacts", artifacts_dir, "directory with sweep.csv or policy.json")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(opts);
    if (simulate_cmd->parsed()) return cmd_simulate(opts, policy_path, paths_override, in_sample);
    if (sweep->parsed()) return cmd_sweep(opts, parameter, values, paths_override);
    if (report->parsed()) return cmd_report(artifacts_dir);
  } catch (const SolveError& e) {
    std::cerr << "tcmv: numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "tcmv: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "tcmv: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "tcmv: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
