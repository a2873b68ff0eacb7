#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "ovsim/linear_solver.hpp"

namespace ovsim {

/// Unknown located at a structured-grid node: (i, j, k, component).
using GridDof = std::array<int, 4>;

/// Conjugate gradients preconditioned by a geometric multigrid V-cycle on a structured
/// node grid. Coarse levels double the spacing, use trilinear prolongation P and the
/// Galerkin operator P^T A P; smoothing is Chebyshev-accelerated Jacobi, identical
/// before and after coarse correction, so the preconditioner stays symmetric.
class MultigridSolver {
 public:
  /// `A` is the full symmetric matrix; dofs[r] locates unknown r on a grid with
  /// `node_dims` nodes per axis.
  MultigridSolver(const SparseMatrix& A, std::span<const GridDof> dofs, std::array<int, 3> node_dims);
  ~MultigridSolver();
  MultigridSolver(MultigridSolver&&) noexcept;
  MultigridSolver& operator=(MultigridSolver&&) noexcept;

  /// `x` carries the initial guess in and the solution out. Throws SolverError unless
  /// ||b - Ax|| / ||b|| <= rel_tol within max_iterations.
  SolveReport solve(const Eigen::VectorXd& b, Eigen::VectorXd& x, double rel_tol, int max_iterations = 500) const;

  int level_count() const;
  std::size_t unknowns(int level) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ovsim
