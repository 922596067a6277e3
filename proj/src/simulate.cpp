#include "tcmv/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "tcmv/rng.hpp"

namespace tcmv {

namespace {

constexpr long kBlock = 8192;
constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599344;

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

// Deterministic blocked compensated sum of f(x_i); block partials are
// combined in index order so thread count never changes the result.
template <typename F>
double blocked_sum(const Eigen::VectorXd& x, F&& f) {
  const long n = x.size();
  const long blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long b = 0; b < blocks; ++b) {
    KahanSum acc;
    const long hi = std::min((b + 1) * kBlock, n);
    for (long i = b * kBlock; i < hi; ++i) acc.add(f(x[i]));
    partial[b] = acc.sum + acc.carry;
  }
  KahanSum total;
  for (double p : partial) total.add(p);
  return total.sum + total.carry;
}

Eigen::VectorXd sorted_copy(const Eigen::VectorXd& x) {
  Eigen::VectorXd s = x;
  std::sort(s.data(), s.data() + s.size());
  return s;
}

double quantile_sorted(const Eigen::VectorXd& s, double q) {
  const long n = s.size();
  const double pos = q * static_cast<double>(n - 1);
  const long lo = static_cast<long>(std::floor(pos));
  const long hi = std::min(lo + 1, n - 1);
  const double frac = pos - static_cast<double>(lo);
  return s[lo] * (1.0 - frac) + s[hi] * frac;
}

template <typename DrawFn>
SimulationResult run_paths(const ActionFn& action, const Eigen::VectorXd& riskfree, double x0,
                           long n_paths, std::uint64_t seed, DrawFn&& draw) {
  if (n_paths < 1) throw std::invalid_argument("need at least one path");
  const int T = static_cast<int>(riskfree.size());

  SimulationResult result;
  result.n_paths = n_paths;
  result.seed = seed;
  result.path_wealth.resize(n_paths, T);
  result.terminal.resize(n_paths);

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long i = 0; i < n_paths; ++i) {
    double wealth = x0;
    for (int t = 0; t < T; ++t) {
      const Eigen::VectorXd u = action(t, wealth);
      const Eigen::VectorXd excess = draw(t, i);
      wealth = riskfree[t] * wealth + excess.dot(u);
      result.path_wealth(i, t) = wealth;
    }
    result.terminal[i] = wealth;
  }

  const double n = static_cast<double>(n_paths);
  result.mean = blocked_sum(result.terminal, [](double v) { return v; }) / n;
  const double mean = result.mean;
  const double ss =
      blocked_sum(result.terminal, [mean](double v) { return (v - mean) * (v - mean); });
  result.variance = n_paths > 1 ? ss / (n - 1.0) : 0.0;
  result.stderr_mean = std::sqrt(std::max(result.variance, 0.0) / n);
  const double m4 =
      blocked_sum(result.terminal, [mean](double v) {
        const double d = v - mean;
        return d * d * d * d;
      }) /
      n;
  const double var_pop = ss / n;
  result.stderr_variance = std::sqrt(std::max(m4 - var_pop * var_pop, 0.0) / n);

  result.quantile_levels.resize(5);
  result.quantile_levels << 0.05, 0.25, 0.5, 0.75, 0.95;
  result.quantiles.resize(T, result.quantile_levels.size());
  for (int t = 0; t < T; ++t) {
    const Eigen::VectorXd s = sorted_copy(result.path_wealth.col(t));
    for (Eigen::Index q = 0; q < result.quantile_levels.size(); ++q)
      result.quantiles(t, q) = quantile_sorted(s, result.quantile_levels[q]);
  }

  const double var_scale = std::max(1.0, std::abs(result.mean));
  if (result.variance > 1e-24 * var_scale * var_scale) {
    result.sharpe = sharpe_ratio(result.terminal, x0, discount_curve(riskfree));
    if (n_paths >= 100) {
      try {
        result.density = density_estimate(result.terminal);
      } catch (const std::domain_error&) {
        result.density.reset();
        result.degenerate = true;
      }
    }
  } else {
    result.degenerate = true;
  }
  return result;
}

}  // namespace

DensityEstimate density_estimate(const Eigen::VectorXd& samples, std::optional<double> bandwidth) {
  const long n = samples.size();
  if (n < 100) throw std::invalid_argument("density estimate needs at least 100 samples");

  const double mean = samples.mean();
  const double sd = std::sqrt((samples.array() - mean).square().sum() / static_cast<double>(n - 1));
  const Eigen::VectorXd s = sorted_copy(samples);
  const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);

  double h = bandwidth.value_or(0.0);
  if (h <= 0.0) {
    const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);  // Silverman
  }
  if (!(h > 0.0)) throw std::domain_error("degenerate sample: no spread for density estimate");

  constexpr int kGrid = 512;
  DensityEstimate out;
  out.bandwidth = h;
  out.x.resize(kGrid);
  out.pdf.resize(kGrid);
  const double lo = s[0] - 3.0 * h;
  const double hi = s[n - 1] + 3.0 * h;
  const double step = (hi - lo) / static_cast<double>(kGrid - 1);
  const double scale = kInvSqrt2Pi / (h * static_cast<double>(n));

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int g = 0; g < kGrid; ++g) {
    const double x = lo + step * g;
    KahanSum acc;
    for (long i = 0; i < n; ++i) {
      const double z = (x - s[i]) / h;
      acc.add(std::exp(-0.5 * z * z));
    }
    out.x[g] = x;
    out.pdf[g] = scale * (acc.sum + acc.carry);
  }
  return out;
}

SimulationResult simulate(const ActionFn& action, const MarketSpec& spec, double x0, long n_paths,
                          std::uint64_t seed) {
  spec.validate();
  if (spec.has_moment_model()) {
    const LognormalModel model = build_return_model(spec.moment_model());
    return run_paths(action, spec.riskfree, x0, n_paths, seed, [&](int t, long i) {
      return draw_excess(model, spec.riskfree[t], seed, t, static_cast<std::uint64_t>(i));
    });
  }
  // Raw markets: bootstrap rows of the supplied scenarios.
  const auto& raw = spec.raw_scenarios();
  return run_paths(action, spec.riskfree, x0, n_paths, seed, [&](int t, long i) {
    const auto& period = raw.periods[t];
    const auto row = rng::uniform_index(seed, rng::Stream::bootstrap,
                                        static_cast<std::uint32_t>(t),
                                        static_cast<std::uint64_t>(i), period.rows());
    return Eigen::VectorXd(period.row(row).transpose());
  });
}

SimulationResult simulate_bootstrap(const ActionFn& action, const ScenarioSet& sc,
                                    const Eigen::VectorXd& riskfree, double x0, long n_paths,
                                    std::uint64_t seed) {
  return run_paths(action, riskfree, x0, n_paths, seed, [&](int t, long i) {
    const auto& period = sc.excess(t);
    const auto row = rng::uniform_index(seed, rng::Stream::bootstrap,
                                        static_cast<std::uint32_t>(t),
                                        static_cast<std::uint64_t>(i), period.rows());
    return Eigen::VectorXd(period.row(row).transpose());
  });
}

double sharpe_ratio(const Eigen::VectorXd& terminal, double x0, const DiscountCurve& curve) {
  const long n = terminal.size();
  if (n < 2) throw std::invalid_argument("Sharpe ratio needs at least 2 samples");
  const double mean = terminal.mean();
  const double var = (terminal.array() - mean).square().sum() / static_cast<double>(n - 1);
  // A spread at rounding level is a constant sample in disguise.
  const double scale = std::max(1.0, std::abs(mean));
  if (!(var > 1e-24 * scale * scale))
    throw std::domain_error("Sharpe ratio undefined for zero variance");
  return (mean - curve.rho[0] * x0) / std::sqrt(var);
}

Eigen::VectorXd threshold_probabilities(const PolicyTable& policy, const ScenarioSet& out_sample) {
  if (out_sample.horizon() < policy.horizon)
    throw std::invalid_argument("out-of-sample set shorter than the policy horizon");
  Eigen::VectorXd q(policy.horizon);
  for (int t = 0; t < policy.horizon; ++t) {
    const RowMatrixXd& P = out_sample.excess(t);
    const Eigen::VectorXd w = (P * policy.K_minus[t]).array() + policy.riskfree[t];
    long count = 0;
    for (long i = 0; i < w.size(); ++i) count += w[i] > 0.0 ? 1 : 0;
    q[t] = static_cast<double>(count) / static_cast<double>(w.size());
  }
  return q;
}

}  // namespace tcmv
