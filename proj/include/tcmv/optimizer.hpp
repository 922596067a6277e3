#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tcmv/cone.hpp"
#include "tcmv/policy.hpp"
#include "tcmv/stage.hpp"

namespace tcmv {

// Deterministic multi-start compass search. Seeds: the analytic last-stage
// candidate +/-(gamma/2) Cov^{-1} E[P], the previous stage's solution, the
// origin, and a lattice of lattice_per_axis points per axis spanning a box of
// radius 4 * ||analytic seed|| + 1.
struct SearchConfig {
  int lattice_per_axis = 3;
  double step_init = 0.25;
  double step_shrink = 0.5;
  double step_tol = 1e-6;
  long max_evals = 200000;  // per stage and side
  int polish_rounds = 6;

  void validate() const;  // throws std::invalid_argument
};

struct StageSolveResult {
  Eigen::VectorXd K;
  double objective = 0.0;
  long evaluations = 0;
  bool converged = true;
  std::string winner_seed;
  // Objective at each seed before any descent; the winner is never above any
  // of these.
  std::vector<double> seed_objectives;
  std::vector<std::string> seed_labels;
};

StageSolveResult solve_stage_unconstrained(const StageContext& ctx, Side side, double gamma,
                                           const NextCoeffs& next, const SearchConfig& cfg,
                                           const Eigen::VectorXd* warm_start = nullptr);

StageSolveResult solve_stage_cone(const StageContext& ctx, Side side, double gamma,
                                  const NextCoeffs& next, const ConeConstraint& cone,
                                  const SearchConfig& cfg,
                                  const Eigen::VectorXd* warm_start = nullptr);

// Raised when a finished backward pass violates the b - a^2 >= 0 validity
// condition; names the stage and side, and signals an inadequate search.
struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StageDiagnostics {
  int t = -1;
  Side side = Side::plus;
  long evaluations = 0;
  bool converged = true;
  std::string winner_seed;
  double objective = 0.0;
  double validity_margin = 0.0;  // b_t - a_t^2 for this side
};

struct SolveOutput {
  PolicyTable policy;
  CoefficientTable coeffs;
  std::vector<StageDiagnostics> diagnostics;
};

// Backward induction t = T-1..0: solve both one-stage problems, then roll the
// coefficient recursion. Throws SolveError when the validity check fails
// beyond 1e-8.
SolveOutput backward_solve(const MarketSpec& spec, const RiskAversionSpec& risk,
                           const std::optional<ConeConstraint>& cone, const ScenarioSet& sc,
                           const SearchConfig& cfg);

}  // namespace tcmv
