#include "tcmv/cone.hpp"

#include <Eigen/SVD>
#include <sstream>
#include <stdexcept>

namespace tcmv {

ConeConstraint ConeConstraint::no_shorting(int assets) {
  ConeConstraint cone;
  cone.A = Eigen::MatrixXd::Identity(assets, assets);
  cone.name = "no_shorting";
  return cone;
}

ConeConstraint ConeConstraint::from_rows(Eigen::MatrixXd rows, std::string name) {
  ConeConstraint cone;
  cone.A = std::move(rows);
  cone.name = std::move(name);
  return cone;
}

bool ConeConstraint::contains(const Eigen::VectorXd& u) const {
  if (unconstrained()) return true;
  return (A * u).minCoeff() >= -1e-10 * u.norm();
}

Eigen::VectorXd ConeConstraint::project(const Eigen::VectorXd& u, double tol,
                                        int max_cycles) const {
  if (unconstrained()) return u;
  const int m = rows();
  Eigen::VectorXd y = u;
  Eigen::MatrixXd increments = Eigen::MatrixXd::Zero(m, u.size());
  const Eigen::VectorXd row_sq = A.rowwise().squaredNorm();

  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    for (int i = 0; i < m; ++i) {
      if (row_sq[i] == 0.0) continue;
      const Eigen::VectorXd z = y + increments.row(i).transpose();
      const double violation = std::min(0.0, A.row(i).dot(z));
      const Eigen::VectorXd projected = z - (violation / row_sq[i]) * A.row(i).transpose();
      increments.row(i) = (z - projected).transpose();
      y = projected;
    }
    // Points in the polar cone project to the origin; the iterates then decay
    // geometrically and never satisfy a relative test, so snap them.
    if (y.norm() <= 1e-12 * (1.0 + u.norm())) return Eigen::VectorXd::Zero(u.size());
    // Strictly tighter than contains() so projected points always pass it.
    if ((A * y).minCoeff() >= -0.5 * tol * y.norm()) return y;
  }

  std::ostringstream msg;
  msg << "cone projection did not converge for point [" << u.transpose() << "]";
  throw std::runtime_error(msg.str());
}

Eigen::MatrixXd ConeConstraint::lineality_projector(int assets) const {
  if (unconstrained()) return Eigen::MatrixXd::Identity(assets, assets);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-12 * (sv.size() > 0 ? sv[0] : 0.0);
  Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(assets, assets);
  // Keep the components along right-singular vectors with (numerically) zero
  // singular value: that is the null space of A.
  for (Eigen::Index j = 0; j < svd.matrixV().cols(); ++j) {
    const double s = j < sv.size() ? sv[j] : 0.0;
    if (s <= cutoff) {
      const Eigen::VectorXd v = svd.matrixV().col(j);
      proj += v * v.transpose();
    }
  }
  return proj;
}

Eigen::VectorXd ConeConstraint::project_lineality(const Eigen::VectorXd& u) const {
  if (unconstrained()) return u;
  return lineality_projector(static_cast<int>(u.size())) * u;
}

}  // namespace tcmv
