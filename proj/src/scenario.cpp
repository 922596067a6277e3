#include "tcmv/scenario.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

#include "tcmv/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tcmv {

namespace {

PeriodMoments compute_moments(const RowMatrixXd& P) {
  PeriodMoments pm;
  const double n = static_cast<double>(P.rows());
  pm.mean = P.colwise().sum().transpose() / n;
  pm.second_moment = (P.transpose() * P) / n;
  pm.cov = pm.second_moment - pm.mean * pm.mean.transpose();
  return pm;
}

bool positive_definite(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const double max_ev = es.eigenvalues().cwiseAbs().maxCoeff();
  return es.eigenvalues().minCoeff() > 1e-13 * std::max(max_ev, 1.0);
}

}  // namespace

ScenarioSet::ScenarioSet(std::vector<RowMatrixXd> periods, std::uint64_t seed)
    : periods_(std::move(periods)), seed_(seed) {
  if (periods_.empty()) throw std::invalid_argument("scenario set needs at least one period");
  assets_ = static_cast<int>(periods_.front().cols());
  moments_.reserve(periods_.size());
  for (const auto& p : periods_) {
    if (p.cols() != assets_) throw std::invalid_argument("scenario period column mismatch");
    if (p.rows() < 2) throw std::invalid_argument("scenario covariance needs at least 2 samples");
    moments_.push_back(compute_moments(p));
  }
}

const PeriodMoments& scenario_moments(const ScenarioSet& sc, int t) {
  if (t < 0 || t >= sc.horizon()) throw std::out_of_range("scenario period out of range");
  const PeriodMoments& pm = sc.moments(t);
  if (!positive_definite(pm.cov))
    throw std::runtime_error("sample covariance is rank deficient in period " + std::to_string(t));
  return pm;
}

ScenarioSet generate_scenarios(const MarketSpec& spec, long n_samples, std::uint64_t seed) {
  spec.validate();
  if (!spec.has_moment_model()) {
    // Raw scenarios pass through unchanged; the sample count is theirs.
    return ScenarioSet(spec.raw_scenarios().periods, seed);
  }
  if (n_samples < 2) throw std::invalid_argument("need at least 2 scenarios per period");

  const LognormalModel model = build_return_model(spec.moment_model());
  const int n = spec.assets;
  const int T = spec.horizon;

  std::vector<RowMatrixXd> periods(T);
  for (int t = 0; t < T; ++t) {
    RowMatrixXd P(n_samples, n);
    const double s = spec.riskfree[t];
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long i = 0; i < n_samples; ++i) {
      Eigen::VectorXd z(n);
      rng::fill_normals(seed, rng::Stream::scenarios, static_cast<std::uint32_t>(t),
                        static_cast<std::uint64_t>(i), z.data(), n);
      const Eigen::VectorXd log_gross = model.mu + model.chol * z;
      for (int j = 0; j < n; ++j) P(i, j) = std::exp(log_gross[j]) - s;
    }
    periods[t] = std::move(P);
  }

  ScenarioSet sc(std::move(periods), seed);
  for (int t = 0; t < T; ++t) scenario_moments(sc, t);  // enforce full rank up front
  return sc;
}

Eigen::VectorXd draw_excess(const LognormalModel& model, double riskfree_rate, std::uint64_t seed,
                            int period, std::uint64_t path) {
  const int n = static_cast<int>(model.mu.size());
  Eigen::VectorXd z(n);
  rng::fill_normals(seed, rng::Stream::simulation, static_cast<std::uint32_t>(period), path,
                    z.data(), n);
  Eigen::VectorXd e = (model.mu + model.chol * z).array().exp();
  return e.array() - riskfree_rate;
}

}  // namespace tcmv
