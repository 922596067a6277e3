#pragma once

#include <Eigen/Dense>

namespace tcmv {

// Per-period risk-aversion slopes and the wealth target W. The slopes may be
// any reals; no sign restriction is enforced.
struct RiskAversionSpec {
  Eigen::VectorXd gamma_plus;   // length T
  Eigen::VectorXd gamma_minus;  // length T
  double target = 0.0;          // W

  static RiskAversionSpec constant(int horizon, double gp, double gm, double target);
  void validate(int horizon) const;  // throws std::invalid_argument
};

// Backward-recursion state a_t^+/-, b_t^+/- for t = 0..T; index T holds the
// terminal zeros. b_t - a_t^2 is a variance, so it stays >= 0 up to rounding.
struct CoefficientTable {
  Eigen::VectorXd a_plus;
  Eigen::VectorXd a_minus;
  Eigen::VectorXd b_plus;
  Eigen::VectorXd b_minus;

  static CoefficientTable zeros(int horizon);

  int horizon() const { return static_cast<int>(a_plus.size()) - 1; }

  // Smallest b - a^2 over both branches and all t; valid tables keep this
  // above -eps.
  double validity_margin() const;
  bool valid(double eps = 1e-8) const { return validity_margin() >= -eps; }
};

}  // namespace tcmv
