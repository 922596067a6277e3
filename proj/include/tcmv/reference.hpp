#pragma once

#include "tcmv/stage.hpp"

// Plain serial transcription of the stage objective and the coefficient
// recursion, one loop per term. Deliberately kept independent of the fused
// kernel in stage.cpp: the tests cross-check the two paths against each other
// and the benchmark compares their throughput.

namespace tcmv::reference {

double eval_F_plus(const Eigen::VectorXd& K, const RowMatrixXd& excess, double s, double rho_next,
                   double gamma_plus, const NextCoeffs& next);

double eval_F_minus(const Eigen::VectorXd& K, const RowMatrixXd& excess, double s, double rho_next,
                    double gamma_minus, const NextCoeffs& next);

struct CoefficientUpdate {
  double a = 0.0;
  double b = 0.0;
};

CoefficientUpdate update_plus(const Eigen::VectorXd& K_plus, const RowMatrixXd& excess, double s,
                              double rho_next, const NextCoeffs& next);

CoefficientUpdate update_minus(const Eigen::VectorXd& K_minus, const RowMatrixXd& excess, double s,
                               double rho_next, const NextCoeffs& next);

}  // namespace tcmv::reference
