#include "tcmv/reference.hpp"

#include <functional>

namespace tcmv::reference {

// Every function below walks the scenarios one term at a time, mirroring the
// algebraic layout of the stage objective. Slow and obvious on purpose.

namespace {

double avg(const RowMatrixXd& P, const std::function<double(double w, double z)>& f,
           const Eigen::VectorXd& K, double s) {
  double sum = 0.0;
  for (long i = 0; i < P.rows(); ++i) {
    const double z = P.row(i).dot(K);
    sum += f(s + z, z);
  }
  return sum / static_cast<double>(P.rows());
}

}  // namespace

double eval_F_plus(const Eigen::VectorXd& K, const RowMatrixXd& excess, double s, double rho_next,
                   double gamma_plus, const NextCoeffs& c) {
  const long N = excess.rows();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(K.size());
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(K.size(), K.size());
  for (long i = 0; i < N; ++i) {
    mean += excess.row(i).transpose();
    second += excess.row(i).transpose() * excess.row(i);
  }
  mean /= static_cast<double>(N);
  second /= static_cast<double>(N);

  const double term_quad =
      rho_next * rho_next * K.dot((second - mean * mean.transpose()) * K);

  const double second_up = avg(
      excess,
      [&](double w, double) { return w >= 0.0 ? (2.0 * rho_next * c.a_plus + c.b_plus) * w * w : 0.0; },
      K, s);
  const double second_dn = avg(
      excess,
      [&](double w, double) { return w < 0.0 ? (2.0 * rho_next * c.a_minus + c.b_minus) * w * w : 0.0; },
      K, s);

  const double first_up =
      avg(excess, [&](double w, double) { return w >= 0.0 ? c.a_plus * w : 0.0; }, K, s);
  const double first_dn =
      avg(excess, [&](double w, double) { return w < 0.0 ? c.a_minus * w : 0.0; }, K, s);

  const double smk = s + mean.dot(K);
  return term_quad + second_up + second_dn - (first_up + first_dn) * (first_up + first_dn) -
         2.0 * rho_next * first_up * smk - 2.0 * rho_next * first_dn * smk -
         gamma_plus * (first_up + first_dn) - rho_next * gamma_plus * smk;
}

double eval_F_minus(const Eigen::VectorXd& K, const RowMatrixXd& excess, double s, double rho_next,
                    double gamma_minus, const NextCoeffs& c) {
  const long N = excess.rows();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(K.size());
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(K.size(), K.size());
  for (long i = 0; i < N; ++i) {
    mean += excess.row(i).transpose();
    second += excess.row(i).transpose() * excess.row(i);
  }
  mean /= static_cast<double>(N);
  second /= static_cast<double>(N);

  const double term_quad =
      rho_next * rho_next * K.dot((second - mean * mean.transpose()) * K);

  const double second_up = avg(
      excess,
      [&](double w, double) { return w <= 0.0 ? (2.0 * rho_next * c.a_plus + c.b_plus) * w * w : 0.0; },
      K, s);
  const double second_dn = avg(
      excess,
      [&](double w, double) { return w > 0.0 ? (2.0 * rho_next * c.a_minus + c.b_minus) * w * w : 0.0; },
      K, s);

  const double first_up =
      avg(excess, [&](double w, double) { return w <= 0.0 ? c.a_plus * w : 0.0; }, K, s);
  const double first_dn =
      avg(excess, [&](double w, double) { return w > 0.0 ? c.a_minus * w : 0.0; }, K, s);

  const double smk = s + mean.dot(K);
  return term_quad + second_up + second_dn - (first_up + first_dn) * (first_up + first_dn) -
         2.0 * rho_next * first_up * smk - 2.0 * rho_next * first_dn * smk +
         gamma_minus * (first_up + first_dn) + rho_next * gamma_minus * smk;
}

CoefficientUpdate update_plus(const Eigen::VectorXd& K_plus, const RowMatrixXd& excess, double s,
                              double rho_next, const NextCoeffs& c) {
  const long N = excess.rows();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(K_plus.size());
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(K_plus.size(), K_plus.size());
  for (long i = 0; i < N; ++i) {
    mean += excess.row(i).transpose();
    second += excess.row(i).transpose() * excess.row(i);
  }
  mean /= static_cast<double>(N);
  second /= static_cast<double>(N);

  CoefficientUpdate out;
  out.a = rho_next * mean.dot(K_plus) +
          avg(excess, [&](double w, double) { return w >= 0.0 ? c.a_plus * w : c.a_minus * w; },
              K_plus, s);
  out.b = rho_next * rho_next * K_plus.dot(second * K_plus) +
          2.0 * rho_next *
              avg(excess,
                  [&](double w, double z) { return (w >= 0.0 ? c.a_plus : c.a_minus) * w * z; },
                  K_plus, s) +
          avg(excess,
              [&](double w, double) { return (w >= 0.0 ? c.b_plus : c.b_minus) * w * w; }, K_plus,
              s);
  return out;
}

CoefficientUpdate update_minus(const Eigen::VectorXd& K_minus, const RowMatrixXd& excess, double s,
                               double rho_next, const NextCoeffs& c) {
  const long N = excess.rows();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(K_minus.size());
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(K_minus.size(), K_minus.size());
  for (long i = 0; i < N; ++i) {
    mean += excess.row(i).transpose();
    second += excess.row(i).transpose() * excess.row(i);
  }
  mean /= static_cast<double>(N);
  second /= static_cast<double>(N);

  CoefficientUpdate out;
  out.a = rho_next * mean.dot(K_minus) +
          avg(excess, [&](double w, double) { return w <= 0.0 ? c.a_plus * w : c.a_minus * w; },
              K_minus, s);
  out.b = rho_next * rho_next * K_minus.dot(second * K_minus) +
          2.0 * rho_next *
              avg(excess,
                  [&](double w, double z) { return (w <= 0.0 ? c.a_plus : c.a_minus) * w * z; },
                  K_minus, s) +
          avg(excess,
              [&](double w, double) { return (w <= 0.0 ? c.b_plus : c.b_minus) * w * w; }, K_minus,
              s);
  return out;
}

}  // namespace tcmv::reference
