#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tcmv/coefficients.hpp"
#include "tcmv/cone.hpp"
#include "tcmv/market.hpp"
#include "tcmv/scenario.hpp"

namespace tcmv {

struct WealthState {
  int t = 0;
  double wealth = 0.0;
};

// Piecewise-linear feedback policy: risky holdings are K_t^+ * Y_t above the
// discounted target and K_t^- * Y_t below it, Y_t = X_t - rho_t^{-1} W.
struct PolicyTable {
  int horizon = 0;
  int assets = 0;
  double target = 0.0;
  Eigen::VectorXd riskfree;
  DiscountCurve curve;
  std::vector<Eigen::VectorXd> K_plus;   // t = 0..T-1
  std::vector<Eigen::VectorXd> K_minus;  // t = 0..T-1
  bool constrained = false;
  std::optional<ConeConstraint> cone;

  double surplus(int t, double wealth) const { return wealth - curve.rho_inv[t] * target; }

  // Wealth exactly at the reference point routes to the plus branch; both
  // branches vanish there so the action is zero either way.
  Eigen::VectorXd action(const WealthState& state) const;
  Eigen::VectorXd action(int t, double wealth) const { return action({t, wealth}); }
};

struct TerminalMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Terminal mean/variance of the policy from the time-0 coefficients:
// mean = rho_0 X_0 + a_0^br Y_0, variance = (b_0^br - (a_0^br)^2) Y_0^2,
// with the branch picked by the sign of Y_0.
TerminalMoments closed_form_terminal_moments(const PolicyTable& policy,
                                             const CoefficientTable& coeffs, double x0);

// Pre-committed mean-variance baseline (affine feedback in wealth). Uses the
// same sample moments as the main solver.
struct PrecommittedPolicy {
  Eigen::VectorXd riskfree;
  DiscountCurve curve;
  std::vector<Eigen::VectorXd> gain;  // E^{-1}[P P'] E[P] per period
  double lambda0 = 0.0;

  static PrecommittedPolicy build(const MarketSpec& spec, const ScenarioSet& sc, double gamma,
                                  double x0);

  Eigen::VectorXd action(int t, double wealth) const;

  // Lagrange level the truncated-horizon problem would pick at time t; equals
  // lambda0 at (t=0, X_0) and drifts away from it along realized paths.
  static double lambda_at(const ScenarioSet& sc, const DiscountCurve& curve, int t, double wealth,
                          double gamma);
};

using ActionFn = std::function<Eigen::VectorXd(int t, double wealth)>;

inline ActionFn as_action(const PolicyTable& p) {
  return [&p](int t, double w) { return p.action(t, w); };
}

inline ActionFn as_action(const PrecommittedPolicy& p) {
  return [&p](int t, double w) { return p.action(t, w); };
}

}  // namespace tcmv
