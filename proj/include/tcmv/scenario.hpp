#pragma once

#include <cstdint>
#include <vector>

#include "tcmv/market.hpp"

namespace tcmv {

// Sample moments of one period's excess returns under the empirical measure
// (all divisions by N, not N-1: the scenario set *is* the probability space).
struct PeriodMoments {
  Eigen::VectorXd mean;           // E[P]
  Eigen::MatrixXd second_moment;  // E[P P']
  Eigen::MatrixXd cov;            // E[P P'] - E[P] E[P']
};

// Fixed per-period samples of excess returns. Immutable after construction;
// every expectation in the solver and the in-sample consistency checks is an
// average over these rows.
class ScenarioSet {
 public:
  ScenarioSet(std::vector<RowMatrixXd> periods, std::uint64_t seed);

  int horizon() const { return static_cast<int>(periods_.size()); }
  int assets() const { return assets_; }
  long samples(int t) const { return periods_.at(t).rows(); }
  std::uint64_t seed() const { return seed_; }

  const RowMatrixXd& excess(int t) const { return periods_.at(t); }
  // Raw cached moments, no definiteness check.
  const PeriodMoments& moments(int t) const { return moments_.at(t); }

 private:
  std::vector<RowMatrixXd> periods_;
  std::vector<PeriodMoments> moments_;
  int assets_ = 0;
  std::uint64_t seed_ = 0;
};

// Moments with the positive-definiteness check required of a usable period;
// throws std::runtime_error when the sample covariance is rank deficient.
const PeriodMoments& scenario_moments(const ScenarioSet& sc, int t);

// Deterministic function of (spec, n_samples, seed). Moment-model markets get
// lognormal draws keyed by (seed, period, sample); raw markets pass through
// unchanged. Periods are drawn independently.
ScenarioSet generate_scenarios(const MarketSpec& spec, long n_samples, std::uint64_t seed);

// One excess-return draw for path simulation, same generator family as
// generate_scenarios but on its own stream.
Eigen::VectorXd draw_excess(const LognormalModel& model, double riskfree_rate,
                            std::uint64_t seed, int period, std::uint64_t path);

}  // namespace tcmv
