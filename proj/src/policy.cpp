#include "tcmv/policy.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace tcmv {

Eigen::VectorXd PolicyTable::action(const WealthState& state) const {
  if (state.t < 0 || state.t >= horizon)
    throw std::out_of_range("policy action requested outside the horizon");
  const double y = surplus(state.t, state.wealth);
  return y >= 0.0 ? (K_plus[state.t] * y).eval() : (K_minus[state.t] * y).eval();
}

TerminalMoments closed_form_terminal_moments(const PolicyTable& policy,
                                             const CoefficientTable& coeffs, double x0) {
  const double y0 = policy.surplus(0, x0);
  const double a = y0 >= 0.0 ? coeffs.a_plus[0] : coeffs.a_minus[0];
  const double b = y0 >= 0.0 ? coeffs.b_plus[0] : coeffs.b_minus[0];
  TerminalMoments out;
  out.mean = policy.curve.rho[0] * x0 + a * y0;
  out.variance = (b - a * a) * y0 * y0;
  return out;
}

namespace {

Eigen::LDLT<Eigen::MatrixXd> invertible_second_moment(const PeriodMoments& pm) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pm.second_moment, Eigen::EigenvaluesOnly);
  const double max_ev = es.eigenvalues().cwiseAbs().maxCoeff();
  if (es.eigenvalues().minCoeff() <= 1e-13 * std::max(max_ev, 1.0))
    throw std::runtime_error("E[P P'] is singular; pre-committed policy undefined");
  return Eigen::LDLT<Eigen::MatrixXd>(pm.second_moment);
}

// 1 - E[P'] E^{-1}[P P'] E[P] for one period; the product of these factors
// over the remaining horizon sets the pre-committed Lagrange level.
double efficiency_factor(const PeriodMoments& pm) {
  const auto ldlt = invertible_second_moment(pm);
  return 1.0 - pm.mean.dot(ldlt.solve(pm.mean));
}

}  // namespace

PrecommittedPolicy PrecommittedPolicy::build(const MarketSpec& spec, const ScenarioSet& sc,
                                             double gamma, double x0) {
  spec.validate();
  PrecommittedPolicy p;
  p.riskfree = spec.riskfree;
  p.curve = discount_curve(spec.riskfree);
  p.gain.resize(spec.horizon);

  double product = 1.0;
  for (int t = 0; t < spec.horizon; ++t) {
    const PeriodMoments& pm = sc.moments(t);
    const auto ldlt = invertible_second_moment(pm);
    p.gain[t] = ldlt.solve(pm.mean);
    product *= efficiency_factor(pm);
  }
  p.lambda0 = p.curve.rho[0] * x0 + 0.5 * gamma / product;
  return p;
}

Eigen::VectorXd PrecommittedPolicy::action(int t, double wealth) const {
  if (t < 0 || t >= static_cast<int>(gain.size()))
    throw std::out_of_range("pre-committed action requested outside the horizon");
  return -gain[t] * riskfree[t] * (wealth - lambda0 * curve.rho_inv[t]);
}

double PrecommittedPolicy::lambda_at(const ScenarioSet& sc, const DiscountCurve& curve, int t,
                                     double wealth, double gamma) {
  double product = 1.0;
  for (int j = t; j < sc.horizon(); ++j) product *= efficiency_factor(sc.moments(j));
  return curve.rho[t] * wealth + 0.5 * gamma / product;
}

}  // namespace tcmv
