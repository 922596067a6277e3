#include "tcmv/stage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "tcmv/rng.hpp"

namespace tcmv {

namespace {

constexpr long kBlock = 8192;

inline void check_dims(const RowMatrixXd& excess, const Eigen::VectorXd& K) {
  if (K.size() != excess.cols())
    throw std::invalid_argument("fund vector dimension does not match asset count");
}

struct BlockPartial {
  double aw = 0.0;
  double awz = 0.0;
  double bww = 0.0;
};

}  // namespace

BranchMoments branch_moments(const RowMatrixXd& excess, double riskfree_rate,
                             const Eigen::VectorXd& K, Side side, const NextCoeffs& next) {
  check_dims(excess, K);
  const long N = excess.rows();
  const int n = static_cast<int>(excess.cols());
  const long blocks = (N + kBlock - 1) / kBlock;
  const bool plus_side = side == Side::plus;
  const double* data = excess.data();
  const double* k = K.data();

  std::vector<BlockPartial> partial(blocks);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long b = 0; b < blocks; ++b) {
    const long lo = b * kBlock;
    const long hi = std::min(lo + kBlock, N);
    double aw = 0.0, awz = 0.0, bww = 0.0;
    for (long i = lo; i < hi; ++i) {
      const double* row = data + i * n;
      double z = 0.0;
      for (int j = 0; j < n; ++j) z += row[j] * k[j];
      const double w = riskfree_rate + z;
      // Ties at w == 0 take the plus coefficients on both sides.
      const bool up = plus_side ? (w >= 0.0) : (w <= 0.0);
      const double a = up ? next.a_plus : next.a_minus;
      const double bb = up ? next.b_plus : next.b_minus;
      aw += a * w;
      awz += a * w * z;
      bww += bb * w * w;
    }
    partial[b] = {aw, awz, bww};
  }

  BranchMoments out;
  for (long b = 0; b < blocks; ++b) {
    out.aw += partial[b].aw;
    out.awz += partial[b].awz;
    out.bww += partial[b].bww;
  }
  const double inv_n = 1.0 / static_cast<double>(N);
  out.aw *= inv_n;
  out.awz *= inv_n;
  out.bww *= inv_n;
  return out;
}

StageContext StageContext::at(const ScenarioSet& sc, const Eigen::VectorXd& riskfree,
                              const DiscountCurve& curve, int t) {
  if (t < 0 || t >= sc.horizon()) throw std::out_of_range("stage index out of range");
  StageContext ctx;
  ctx.excess = &sc.excess(t);
  ctx.moments = &scenario_moments(sc, t);
  ctx.riskfree_rate = riskfree[t];
  ctx.rho_next = curve.rho[t + 1];
  ctx.t = t;
  return ctx;
}

double eval_stage_objective(const StageContext& ctx, Side side, double gamma,
                            const NextCoeffs& next, const Eigen::VectorXd& K) {
  const BranchMoments bm = branch_moments(*ctx.excess, ctx.riskfree_rate, K, side, next);
  const PeriodMoments& pm = *ctx.moments;
  const double rho = ctx.rho_next;
  const double s = ctx.riskfree_rate;
  const double mk = pm.mean.dot(K);
  const double km2k = K.dot(pm.second_moment * K);
  const double quad = rho * rho * (km2k - mk * mk);  // rho^2 K' Cov K
  // avg (2 rho a + b) w^2 expands to 2 rho (s * aw + awz) + bww.
  const double indicator_second = 2.0 * rho * (s * bm.aw + bm.awz) + bm.bww;
  const double cross = -bm.aw * bm.aw - 2.0 * rho * bm.aw * (s + mk);
  const double trade_off = (side == Side::plus ? -gamma : gamma) * (bm.aw + rho * (s + mk));
  return quad + indicator_second + cross + trade_off;
}

double eval_F_plus(const Eigen::VectorXd& K, int t, const CoefficientTable& coeffs,
                   const ScenarioSet& sc, double gamma_plus, const Eigen::VectorXd& riskfree,
                   const DiscountCurve& curve) {
  const StageContext ctx = StageContext::at(sc, riskfree, curve, t);
  return eval_stage_objective(ctx, Side::plus, gamma_plus, NextCoeffs::at(coeffs, t + 1), K);
}

double eval_F_minus(const Eigen::VectorXd& K, int t, const CoefficientTable& coeffs,
                    const ScenarioSet& sc, double gamma_minus, const Eigen::VectorXd& riskfree,
                    const DiscountCurve& curve) {
  const StageContext ctx = StageContext::at(sc, riskfree, curve, t);
  return eval_stage_objective(ctx, Side::minus, gamma_minus, NextCoeffs::at(coeffs, t + 1), K);
}

void update_coefficients(int t, const Eigen::VectorXd& K_plus, const Eigen::VectorXd& K_minus,
                         CoefficientTable& coeffs, const ScenarioSet& sc,
                         const Eigen::VectorXd& riskfree, const DiscountCurve& curve) {
  const StageContext ctx = StageContext::at(sc, riskfree, curve, t);
  const NextCoeffs next = NextCoeffs::at(coeffs, t + 1);
  const PeriodMoments& pm = *ctx.moments;
  const double rho = ctx.rho_next;

  const BranchMoments plus = branch_moments(*ctx.excess, ctx.riskfree_rate, K_plus, Side::plus, next);
  coeffs.a_plus[t] = rho * pm.mean.dot(K_plus) + plus.aw;
  coeffs.b_plus[t] =
      rho * rho * K_plus.dot(pm.second_moment * K_plus) + 2.0 * rho * plus.awz + plus.bww;

  const BranchMoments minus =
      branch_moments(*ctx.excess, ctx.riskfree_rate, K_minus, Side::minus, next);
  coeffs.a_minus[t] = rho * pm.mean.dot(K_minus) + minus.aw;
  coeffs.b_minus[t] =
      rho * rho * K_minus.dot(pm.second_moment * K_minus) + 2.0 * rho * minus.awz + minus.bww;
}

CoercivityReport coercivity_certificate(const StageContext& ctx, Side side, double gamma,
                                        const NextCoeffs& next, int directions, double radius) {
  CoercivityReport report;
  report.directions = directions;
  report.hypothesis_ok = next.b_plus - next.a_plus * next.a_plus >= 0.0 &&
                         next.b_minus - next.a_minus * next.a_minus >= 0.0;
  if (directions <= 0) return report;  // empty pass

  const int n = static_cast<int>(ctx.excess->cols());
  report.min_margin = std::numeric_limits<double>::infinity();
  for (int d = 0; d < directions; ++d) {
    Eigen::VectorXd dir(n);
    rng::fill_normals(0x5EEDu, rng::Stream::perturbation, static_cast<std::uint32_t>(ctx.t),
                      static_cast<std::uint64_t>(d), dir.data(), n);
    const double norm = dir.norm();
    if (norm == 0.0) continue;
    dir /= norm;
    const double far = eval_stage_objective(ctx, side, gamma, next, radius * dir);
    const double near = eval_stage_objective(ctx, side, gamma, next, (radius / 10.0) * dir);
    report.min_margin = std::min(report.min_margin, far - near);
  }
  report.pass = report.min_margin > 0.0;
  return report;
}

}  // namespace tcmv
