#include "tcmv/market.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace tcmv {

namespace {

void check_correlation(const Eigen::MatrixXd& corr) {
  const auto n = corr.rows();
  if (corr.cols() != n) throw std::invalid_argument("correlation matrix must be square");
  if (!corr.isApprox(corr.transpose(), 1e-12))
    throw std::invalid_argument("correlation matrix must be symmetric");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(corr(i, i) - 1.0) > 1e-12)
      throw std::invalid_argument("correlation matrix must have unit diagonal");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(corr);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("correlation matrix must be positive definite");
}

Eigen::MatrixXd chol_or_throw(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw std::runtime_error(what);
  return llt.matrixL();
}

}  // namespace

void MarketSpec::validate() const {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (assets < 1) throw std::invalid_argument("asset count must be >= 1");
  if (riskfree.size() != horizon)
    throw std::invalid_argument("riskfree rates must have one entry per period");
  for (Eigen::Index t = 0; t < riskfree.size(); ++t) {
    if (!(riskfree[t] > 1.0))
      throw std::invalid_argument("risk-free gross rate must exceed 1 in every period");
  }
  if (has_moment_model()) {
    const auto& m = moment_model();
    if (m.mean.size() != assets || m.stddev.size() != assets || m.corr.rows() != assets)
      throw std::invalid_argument("moment spec dimensions do not match asset count");
    if ((m.stddev.array() <= 0.0).any())
      throw std::invalid_argument("standard deviations must be positive");
    if (!m.log_moments && ((1.0 + m.mean.array()) <= 0.0).any())
      throw std::invalid_argument("gross mean returns must be positive");
    check_correlation(m.corr);
  } else {
    const auto& raw = raw_scenarios();
    if (static_cast<int>(raw.periods.size()) != horizon)
      throw std::invalid_argument("raw scenarios must cover every period");
    for (const auto& p : raw.periods) {
      if (p.cols() != assets) throw std::invalid_argument("raw scenario column count mismatch");
      if (p.rows() < 2) throw std::invalid_argument("raw scenarios need at least 2 samples");
    }
  }
}

LognormalModel calibrate_lognormal(const Eigen::VectorXd& mean, const Eigen::VectorXd& stddev,
                                   const Eigen::MatrixXd& corr) {
  if ((stddev.array() <= 0.0).any())
    throw std::invalid_argument("calibration requires positive standard deviations");
  if (((1.0 + mean.array()) <= 0.0).any())
    throw std::invalid_argument("calibration requires positive gross means");
  check_correlation(corr);

  const Eigen::VectorXd gross = 1.0 + mean.array();
  const Eigen::MatrixXd cov =
      stddev.asDiagonal() * corr * stddev.asDiagonal();  // covariance of gross returns

  // E[e_i] = exp(mu_i + S_ii/2), Cov(e_i, e_j) = E[e_i]E[e_j](exp(S_ij) - 1).
  const int n = static_cast<int>(mean.size());
  Eigen::MatrixXd sigma(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double ratio = cov(i, j) / (gross[i] * gross[j]);
      if (ratio <= -1.0)
        throw std::runtime_error("lognormal calibration failed: log of non-positive ratio");
      sigma(i, j) = std::log1p(ratio);
    }
  }
  sigma = 0.5 * (sigma + sigma.transpose()).eval();

  LognormalModel model;
  model.sigma = sigma;
  model.mu = gross.array().log().matrix() - 0.5 * sigma.diagonal();
  model.chol = chol_or_throw(sigma, "lognormal calibration failed: implied log-covariance not positive definite");
  return model;
}

LognormalModel lognormal_from_log_moments(const Eigen::VectorXd& mean,
                                          const Eigen::VectorXd& stddev,
                                          const Eigen::MatrixXd& corr) {
  if ((stddev.array() <= 0.0).any())
    throw std::invalid_argument("calibration requires positive standard deviations");
  check_correlation(corr);
  LognormalModel model;
  model.mu = mean;
  model.sigma = stddev.asDiagonal() * corr * stddev.asDiagonal();
  model.chol = chol_or_throw(model.sigma, "log-moment covariance not positive definite");
  return model;
}

LognormalModel build_return_model(const MomentSpec& spec) {
  return spec.log_moments ? lognormal_from_log_moments(spec.mean, spec.stddev, spec.corr)
                          : calibrate_lognormal(spec.mean, spec.stddev, spec.corr);
}

GrossMoments lognormal_moments(const LognormalModel& model) {
  const int n = static_cast<int>(model.mu.size());
  GrossMoments out;
  out.mean = (model.mu + 0.5 * model.sigma.diagonal()).array().exp().matrix();
  out.cov.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.cov(i, j) = out.mean[i] * out.mean[j] * std::expm1(model.sigma(i, j));
  return out;
}

DiscountCurve discount_curve(const Eigen::VectorXd& riskfree) {
  const int T = static_cast<int>(riskfree.size());
  DiscountCurve curve;
  curve.rho.resize(T + 1);
  curve.rho_inv.resize(T + 1);
  curve.rho[T] = 1.0;
  curve.rho_inv[T] = 1.0;
  for (int t = T - 1; t >= 0; --t) {
    curve.rho[t] = riskfree[t] * curve.rho[t + 1];
    curve.rho_inv[t] = curve.rho_inv[t + 1] / riskfree[t];
  }
  return curve;
}

DiscountCurve discount_curve(const MarketSpec& spec) {
  spec.validate();
  return discount_curve(spec.riskfree);
}

}  // namespace tcmv
