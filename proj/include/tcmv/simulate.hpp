#pragma once

#include <cstdint>
#include <optional>

#include "tcmv/policy.hpp"

namespace tcmv {

struct DensityEstimate {
  Eigen::VectorXd x;    // 512-point grid
  Eigen::VectorXd pdf;  // Gaussian-kernel density on the grid
  double bandwidth = 0.0;
};

// Gaussian KDE with Silverman's default bandwidth on a grid spanning
// [min - 3h, max + 3h]. Needs at least 100 samples; throws std::domain_error
// when the sample has no spread.
DensityEstimate density_estimate(const Eigen::VectorXd& samples,
                                 std::optional<double> bandwidth = std::nullopt);

struct SimulationResult {
  long n_paths = 0;
  std::uint64_t seed = 0;
  Eigen::VectorXd terminal;         // X_T per path
  RowMatrixXd path_wealth;          // n_paths x T, columns X_1..X_T
  Eigen::VectorXd quantile_levels;  // shared across periods
  Eigen::MatrixXd quantiles;        // T x levels
  double mean = 0.0;
  double variance = 0.0;        // unbiased sample variance
  double stderr_mean = 0.0;
  double stderr_variance = 0.0;  // delta-method
  std::optional<double> sharpe;  // absent when the variance is zero
  std::optional<DensityEstimate> density;
  bool degenerate = false;  // all terminal wealths equal; density skipped
};

// Forward-iterates X_{t+1} = s_t X_t + P_t' u_t under fresh lognormal draws
// keyed by (seed, period, path). Deterministic for a fixed seed regardless of
// thread count.
SimulationResult simulate(const ActionFn& action, const MarketSpec& spec, double x0, long n_paths,
                          std::uint64_t seed);

// Same dynamics, but each period's shock is drawn by bootstrap from the rows
// of the given scenario set (in-sample mode).
SimulationResult simulate_bootstrap(const ActionFn& action, const ScenarioSet& sc,
                                    const Eigen::VectorXd& riskfree, double x0, long n_paths,
                                    std::uint64_t seed);

// (E[X_T] - rho_0 X_0) / std(X_T); throws std::domain_error on zero variance.
double sharpe_ratio(const Eigen::VectorXd& terminal, double x0, const DiscountCurve& curve);

// q_t = fraction of scenarios with s_t + P_t'K_t^- > 0: the chance of staying
// below target next period when below target now.
Eigen::VectorXd threshold_probabilities(const PolicyTable& policy, const ScenarioSet& out_sample);

}  // namespace tcmv
