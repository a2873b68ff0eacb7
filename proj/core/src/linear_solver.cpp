#include "ovsim/linear_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <sstream>

#include "ovsim/error.hpp"

namespace ovsim {

SolveReport solve_spd(const SparseMatrix& A, const Eigen::VectorXd& b, Eigen::VectorXd& x, double rel_tol,
                      int max_iterations) {
  SolveReport report;
  if (b.squaredNorm() == 0.0) {
    x.setZero();
    return report;
  }
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
  cg.setTolerance(rel_tol);
  cg.setMaxIterations(max_iterations > 0 ? max_iterations : 4 * static_cast<int>(A.rows()));
  cg.compute(A);
  if (cg.info() != Eigen::Success) throw SolverError("preconditioner setup failed (singular diagonal)");
  x = cg.solveWithGuess(b, x);
  report.iterations = static_cast<int>(cg.iterations());
  report.relative_residual = (b - A * x).norm() / b.norm();
  if (cg.info() != Eigen::Success || !(report.relative_residual <= 10.0 * rel_tol)) {
    std::ostringstream msg;
    msg << "conjugate gradients did not converge: relative residual " << report.relative_residual << " after "
        << report.iterations << " iterations (tolerance " << rel_tol << ")";
    throw SolverError(msg.str());
  }
  return report;
}

}  // namespace ovsim
