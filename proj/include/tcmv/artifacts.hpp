#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tcmv/coefficients.hpp"
#include "tcmv/optimizer.hpp"
#include "tcmv/policy.hpp"
#include "tcmv/simulate.hpp"

namespace tcmv {

// Solve-time settings echoed into policy.json so reports can label rows.
struct PolicyMeta {
  Eigen::VectorXd gamma_plus;
  Eigen::VectorXd gamma_minus;
  double x0 = 1.0;
};

void write_policy_json(const std::string& path, const PolicyTable& policy, const PolicyMeta& meta);

struct LoadedPolicy {
  PolicyTable policy;
  PolicyMeta meta;
};

LoadedPolicy read_policy_json(const std::string& path);

void write_coefficients_json(const std::string& path, const CoefficientTable& coeffs);
CoefficientTable read_coefficients_json(const std::string& path);

void write_diagnostics_json(const std::string& path, const std::vector<StageDiagnostics>& stages);

struct ClosedFormComparison {
  TerminalMoments closed_form;
  double mean_gap_se = 0.0;      // |MC - closed| / stderr
  double variance_gap_se = 0.0;
  bool agrees_3se = false;
};

ClosedFormComparison compare_closed_form(const SimulationResult& result,
                                         const TerminalMoments& closed_form);

void write_summary_json(const std::string& path, const SimulationResult& result, double x0,
                        double target, const std::optional<ClosedFormComparison>& comparison,
                        const std::optional<Eigen::VectorXd>& threshold_probs);

void write_paths_csv(const std::string& path, const SimulationResult& result);
void write_density_csv(const std::string& path, const SimulationResult& result);

struct SweepRow {
  double gamma_plus = 0.0;
  double gamma_minus = 0.0;
  PolicyTable policy;        // solved tables for this value
  CoefficientTable coeffs;
  std::optional<double> sharpe;
};

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(const std::string& path);

// Text + CSV report mirroring the stage tables (4-decimal rounding).
// Prefers sweep.csv in the artifacts directory, falls back to
// policy.json/coefficients.json. Returns the paths written.
std::vector<std::string> write_report(const std::string& artifacts_dir);

}  // namespace tcmv
