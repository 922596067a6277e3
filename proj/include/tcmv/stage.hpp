#pragma once

#include "tcmv/coefficients.hpp"
#include "tcmv/market.hpp"
#include "tcmv/scenario.hpp"

namespace tcmv {

enum class Side { plus, minus };

inline const char* side_name(Side s) { return s == Side::plus ? "plus" : "minus"; }

// Downstream coefficients a_{t+1}^+/-, b_{t+1}^+/- entering a stage objective.
struct NextCoeffs {
  double a_plus = 0.0;
  double a_minus = 0.0;
  double b_plus = 0.0;
  double b_minus = 0.0;

  static NextCoeffs at(const CoefficientTable& c, int t_next) {
    return {c.a_plus[t_next], c.a_minus[t_next], c.b_plus[t_next], c.b_minus[t_next]};
  }
};

// Scenario averages that carry all K-dependence of a stage objective and of
// the coefficient recursion. With w_i = s + P_i'K and z_i = P_i'K:
//   aw  = avg a_sel(w_i) * w_i
//   awz = avg a_sel(w_i) * w_i * z_i
//   bww = avg b_sel(w_i) * w_i^2
// where the selector pairs (a_plus, b_plus) with w >= 0 on the plus side and
// with w <= 0 on the minus side (ties go to the plus coefficients on both).
struct BranchMoments {
  double aw = 0.0;
  double awz = 0.0;
  double bww = 0.0;
};

// Production kernel: blocked pass over the scenario rows, OpenMP-parallel
// across blocks. Block partials are combined in index order, so the result is
// bit-identical for any thread count.
BranchMoments branch_moments(const RowMatrixXd& excess, double riskfree_rate,
                             const Eigen::VectorXd& K, Side side, const NextCoeffs& next);

// Everything fixed about one period: scenario rows, cached moments, s_t and
// the discount factor rho_{t+1} of the remaining horizon.
struct StageContext {
  const RowMatrixXd* excess = nullptr;
  const PeriodMoments* moments = nullptr;
  double riskfree_rate = 0.0;  // s_t
  double rho_next = 0.0;       // rho_{t+1}
  int t = -1;

  static StageContext at(const ScenarioSet& sc, const Eigen::VectorXd& riskfree,
                         const DiscountCurve& curve, int t);
};

// Stage objective F_t^+ or F_t^- as a deterministic function of the fund
// vector K under the scenario measure.
double eval_stage_objective(const StageContext& ctx, Side side, double gamma,
                            const NextCoeffs& next, const Eigen::VectorXd& K);

// Convenience wrappers on full tables.
double eval_F_plus(const Eigen::VectorXd& K, int t, const CoefficientTable& coeffs,
                   const ScenarioSet& sc, double gamma_plus, const Eigen::VectorXd& riskfree,
                   const DiscountCurve& curve);
double eval_F_minus(const Eigen::VectorXd& K, int t, const CoefficientTable& coeffs,
                    const ScenarioSet& sc, double gamma_minus, const Eigen::VectorXd& riskfree,
                    const DiscountCurve& curve);

// Backward step: writes a_t^+/-, b_t^+/- for the given stage funds, reading
// the t+1 entries of `coeffs`.
void update_coefficients(int t, const Eigen::VectorXd& K_plus, const Eigen::VectorXd& K_minus,
                         CoefficientTable& coeffs, const ScenarioSet& sc,
                         const Eigen::VectorXd& riskfree, const DiscountCurve& curve);

// Ray-growth check: F(radius * L) must exceed F(radius/10 * L) along a
// deterministic set of unit directions. Flags (without failing) when the
// b - a^2 hypothesis does not hold downstream.
struct CoercivityReport {
  bool hypothesis_ok = true;
  bool pass = true;
  double min_margin = 0.0;
  int directions = 0;
};

CoercivityReport coercivity_certificate(const StageContext& ctx, Side side, double gamma,
                                        const NextCoeffs& next, int directions, double radius);

}  // namespace tcmv
