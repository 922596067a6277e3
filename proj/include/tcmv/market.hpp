#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tcmv {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Moment description of the risky annual returns: mean/stddev of the simple
// return plus a correlation matrix. With log_moments=true the same numbers are
// read as moments of the log return instead (config switch).
struct MomentSpec {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
  Eigen::MatrixXd corr;
  bool log_moments = false;
};

// User-supplied excess-return samples, one matrix (samples x assets) per period.
struct RawScenarios {
  std::vector<RowMatrixXd> periods;
};

struct MarketSpec {
  int horizon = 0;               // T
  int assets = 0;                // n
  Eigen::VectorXd riskfree;      // gross per-period rates s_t, each > 1
  std::vector<std::string> asset_names;
  std::variant<MomentSpec, RawScenarios> returns;

  bool has_moment_model() const { return std::holds_alternative<MomentSpec>(returns); }
  const MomentSpec& moment_model() const { return std::get<MomentSpec>(returns); }
  const RawScenarios& raw_scenarios() const { return std::get<RawScenarios>(returns); }

  // Throws std::invalid_argument on any violated constraint.
  void validate() const;
};

// Parameters of the fitted multivariate lognormal for gross returns:
// log e ~ N(mu, sigma).
struct LognormalModel {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd chol;  // lower-triangular factor of sigma
};

struct GrossMoments {
  Eigen::VectorXd mean;  // E[e]
  Eigen::MatrixXd cov;   // Cov(e)
};

// Moment-matches a lognormal to the given simple-return moments:
// E[e_i] = 1 + mean_i and Cov(e) = diag(std) * corr * diag(std).
LognormalModel calibrate_lognormal(const Eigen::VectorXd& mean, const Eigen::VectorXd& stddev,
                                   const Eigen::MatrixXd& corr);

// Reads the moment spec as log-return moments directly (no inversion).
LognormalModel lognormal_from_log_moments(const Eigen::VectorXd& mean,
                                          const Eigen::VectorXd& stddev,
                                          const Eigen::MatrixXd& corr);

LognormalModel build_return_model(const MomentSpec& spec);

// Exact gross-return moments implied by a lognormal model.
GrossMoments lognormal_moments(const LognormalModel& model);

// rho_inv[t] = prod_{j=t}^{T-1} 1/s_j with rho_inv[T] = 1, and its inverse
// rho[t]; rho_inv is the factor that discounts the target back to time t.
struct DiscountCurve {
  Eigen::VectorXd rho;      // size T+1
  Eigen::VectorXd rho_inv;  // size T+1
};

DiscountCurve discount_curve(const MarketSpec& spec);
DiscountCurve discount_curve(const Eigen::VectorXd& riskfree);

}  // namespace tcmv
