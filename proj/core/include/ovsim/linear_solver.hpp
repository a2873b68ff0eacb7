#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace ovsim {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

struct SolveReport {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Diagonally preconditioned conjugate gradients on an SPD matrix. `x` carries the
/// initial guess in and the solution out. Throws SolverError if ||b - Ax|| / ||b|| does
/// not reach rel_tol within max_iterations (0 selects 4n).
SolveReport solve_spd(const SparseMatrix& A, const Eigen::VectorXd& b, Eigen::VectorXd& x, double rel_tol,
                      int max_iterations = 0);

}  // namespace ovsim
