#pragma once

#include <Eigen/Dense>
#include <string>

namespace tcmv {

// Polyhedral cone A_t = {u : A u >= 0}. Zero rows mean "no constraint".
//
// The surplus-branch fund is searched over the cone itself. The shortage
// branch uses the cone's lineality space {u : A u = 0}: the fund must keep the
// realized position admissible (K in -A_t, since it multiplies a negative
// surplus) while itself staying an admissible direction (K in A_t). For the
// no-shorting preset that pins the shortage fund to exactly zero.
struct ConeConstraint {
  Eigen::MatrixXd A;  // m x n
  std::string name;

  static ConeConstraint no_shorting(int assets);
  static ConeConstraint from_rows(Eigen::MatrixXd rows, std::string name = "custom");

  int rows() const { return static_cast<int>(A.rows()); }
  bool unconstrained() const { return A.rows() == 0; }

  // min_i (A u)_i >= -1e-10 * ||u||.
  bool contains(const Eigen::VectorXd& u) const;

  // Euclidean projection onto {A u >= 0} by Dykstra's cyclic scheme over the
  // halfspaces; exact in one sweep for the no-shorting preset (clipping).
  // Throws std::runtime_error with the offending point on non-convergence.
  Eigen::VectorXd project(const Eigen::VectorXd& u, double tol = 1e-10,
                          int max_cycles = 10000) const;

  // Orthogonal projector onto the lineality space {A u = 0}.
  Eigen::MatrixXd lineality_projector(int assets) const;

  // Exact projection onto the lineality space {A u = 0}.
  Eigen::VectorXd project_lineality(const Eigen::VectorXd& u) const;
};

}  // namespace tcmv
