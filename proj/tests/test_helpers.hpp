#pragma once

#include <Eigen/Dense>

#include "tcmv/coefficients.hpp"
#include "tcmv/market.hpp"

// Shared fixtures for the test suite: the three-index pension calibration used
// throughout (SP / EM / MS over a 5% bank account, T = 3).

namespace tcmv::testing {

inline MarketSpec pension_market() {
  MarketSpec spec;
  spec.horizon = 3;
  spec.assets = 3;
  spec.riskfree = Eigen::VectorXd::Constant(3, 1.05);
  spec.asset_names = {"SP", "EM", "MS"};
  MomentSpec m;
  m.mean = Eigen::Vector3d(0.14, 0.16, 0.17);
  m.stddev = Eigen::Vector3d(0.185, 0.30, 0.24);
  m.corr.resize(3, 3);
  m.corr << 1.0, 0.64, 0.79,
            0.64, 1.0, 0.75,
            0.79, 0.75, 1.0;
  spec.returns = m;
  return spec;
}

inline RiskAversionSpec pension_risk(double gp = 1.0, double gm = 1.0, double target = 2.0) {
  return RiskAversionSpec::constant(3, gp, gm, target);
}

// Small synthetic market for cheap tests: two assets, two periods.
inline MarketSpec small_market(int horizon = 2) {
  MarketSpec spec;
  spec.horizon = horizon;
  spec.assets = 2;
  spec.riskfree = Eigen::VectorXd::Constant(horizon, 1.03);
  MomentSpec m;
  m.mean = Eigen::Vector2d(0.08, 0.12);
  m.stddev = Eigen::Vector2d(0.15, 0.25);
  m.corr.resize(2, 2);
  m.corr << 1.0, 0.3,
            0.3, 1.0;
  spec.returns = m;
  return spec;
}

}  // namespace tcmv::testing
