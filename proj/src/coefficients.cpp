#include "tcmv/coefficients.hpp"

#include <algorithm>
#include <stdexcept>

namespace tcmv {

RiskAversionSpec RiskAversionSpec::constant(int horizon, double gp, double gm, double target) {
  RiskAversionSpec spec;
  spec.gamma_plus = Eigen::VectorXd::Constant(horizon, gp);
  spec.gamma_minus = Eigen::VectorXd::Constant(horizon, gm);
  spec.target = target;
  return spec;
}

void RiskAversionSpec::validate(int horizon) const {
  if (gamma_plus.size() != horizon || gamma_minus.size() != horizon)
    throw std::invalid_argument("risk aversion arrays must have one entry per period");
}

CoefficientTable CoefficientTable::zeros(int horizon) {
  CoefficientTable table;
  table.a_plus = Eigen::VectorXd::Zero(horizon + 1);
  table.a_minus = Eigen::VectorXd::Zero(horizon + 1);
  table.b_plus = Eigen::VectorXd::Zero(horizon + 1);
  table.b_minus = Eigen::VectorXd::Zero(horizon + 1);
  return table;
}

double CoefficientTable::validity_margin() const {
  double margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < a_plus.size(); ++t) {
    margin = std::min(margin, b_plus[t] - a_plus[t] * a_plus[t]);
    margin = std::min(margin, b_minus[t] - a_minus[t] * a_minus[t]);
  }
  return margin;
}

}  // namespace tcmv
