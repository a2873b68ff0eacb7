#include "ovsim/multigrid.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "ovsim/error.hpp"

namespace ovsim {

namespace {

using RowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

constexpr std::size_t kCoarsest = 4000;  // unknowns solved directly
constexpr int kMaxLevels = 10;
constexpr int kSmoothDegree = 3;

struct Level {
  RowMatrix A;
  Eigen::VectorXd inv_diag;
  double lambda_max = 0.0;  // of D^-1 A
  RowMatrix P;              // this level <- next coarser level
  SparseMatrix Pt;
};

// Largest eigenvalue of D^-1 A by power iteration, padded for safety.
double estimate_lambda_max(const RowMatrix& A, const Eigen::VectorXd& inv_diag) {
  Eigen::VectorXd v(A.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = 1.0 + 0.37 * std::sin(1.7 * static_cast<double>(i));
  double lambda = 0.0;
  for (int it = 0; it < 20; ++it) {
    Eigen::VectorXd w = inv_diag.cwiseProduct(A * v);
    lambda = w.norm() / v.norm();
    v = w / w.norm();
  }
  return 1.1 * lambda;
}

}  // namespace

struct MultigridSolver::Impl {
  std::vector<Level> levels;
  SparseMatrix coarse;
  Eigen::SimplicialLDLT<SparseMatrix> direct;

  // Chebyshev-Jacobi smoothing of A x = b on [lambda_max / 30, lambda_max].
  void smooth(const Level& L, const Eigen::VectorXd& b, Eigen::VectorXd& x) const {
    const double hi = L.lambda_max, lo = hi / 30.0;
    const double theta = 0.5 * (hi + lo), delta = 0.5 * (hi - lo);
    const double sigma = theta / delta;
    double rho = 1.0 / sigma;
    Eigen::VectorXd r = b - L.A * x;
    Eigen::VectorXd d = L.inv_diag.cwiseProduct(r) / theta;
    for (int k = 0; k < kSmoothDegree; ++k) {
      x += d;
      if (k + 1 == kSmoothDegree) break;
      r -= L.A * d;
      const double rho_next = 1.0 / (2.0 * sigma - rho);
      d = (rho_next * rho) * d + (2.0 * rho_next / delta) * L.inv_diag.cwiseProduct(r);
      rho = rho_next;
    }
  }

  Eigen::VectorXd vcycle(std::size_t l, const Eigen::VectorXd& b) const {
    if (l == levels.size()) return direct.solve(b);
    const Level& L = levels[l];
    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
    smooth(L, b, x);
    const Eigen::VectorXd r = b - L.A * x;
    x += L.P * vcycle(l + 1, L.Pt * r);
    smooth(L, b, x);
    return x;
  }
};

MultigridSolver::MultigridSolver(const SparseMatrix& A, std::span<const GridDof> dofs, std::array<int, 3> node_dims)
    : impl_(std::make_unique<Impl>()) {
  if (A.rows() != static_cast<Eigen::Index>(dofs.size())) throw SolverError("multigrid: dof map size mismatch");
  std::vector<GridDof> fine(dofs.begin(), dofs.end());
  std::array<int, 3> dims = node_dims;
  SparseMatrix current = A;

  while (static_cast<std::size_t>(current.rows()) > kCoarsest &&
         static_cast<int>(impl_->levels.size()) < kMaxLevels) {
    std::array<int, 3> cdims{};
    for (int a = 0; a < 3; ++a) cdims[a] = dims[a] / 2 + 1;
    if (cdims == dims) break;

    // Coarse unknowns: every (coarse node, component) touched by a fine unknown.
    std::unordered_map<std::int64_t, int> coarse_index;
    std::vector<GridDof> coarse;
    std::vector<Eigen::Triplet<double>> trip;
    auto key = [&](int i, int j, int k, int c) {
      return ((static_cast<std::int64_t>(k) * cdims[1] + j) * cdims[0] + i) * 4 + c;
    };
    for (std::size_t r = 0; r < fine.size(); ++r) {
      const auto& f = fine[r];
      int lo[3], hi[3];
      double wlo[3], whi[3];
      for (int a = 0; a < 3; ++a) {
        lo[a] = f[a] / 2;
        if (f[a] % 2 == 0) {
          hi[a] = lo[a];
          wlo[a] = 1.0;
          whi[a] = 0.0;
        } else {
          hi[a] = lo[a] + 1;
          wlo[a] = whi[a] = 0.5;
        }
      }
      for (int c = 0; c < 8; ++c) {
        const int pick[3] = {c & 1, (c >> 1) & 1, (c >> 2) & 1};
        double w = 1.0;
        int idx[3];
        for (int a = 0; a < 3; ++a) {
          w *= pick[a] ? whi[a] : wlo[a];
          idx[a] = pick[a] ? hi[a] : lo[a];
        }
        if (w == 0.0) continue;
        const auto [it, inserted] =
            coarse_index.try_emplace(key(idx[0], idx[1], idx[2], f[3]), static_cast<int>(coarse.size()));
        if (inserted) coarse.push_back({idx[0], idx[1], idx[2], f[3]});
        trip.emplace_back(static_cast<int>(r), it->second, w);
      }
    }

    Level L;
    L.A = current;
    L.inv_diag = current.diagonal().cwiseInverse();
    if (!L.inv_diag.allFinite() || (current.diagonal().array() <= 0.0).any()) {
      throw SolverError("multigrid: matrix has a nonpositive diagonal");
    }
    L.lambda_max = estimate_lambda_max(L.A, L.inv_diag);
    SparseMatrix P(static_cast<Eigen::Index>(fine.size()), static_cast<Eigen::Index>(coarse.size()));
    P.setFromTriplets(trip.begin(), trip.end());
    L.Pt = P.transpose();
    L.P = P;
    SparseMatrix AP = current * P;
    current = SparseMatrix(L.Pt * AP);
    impl_->levels.push_back(std::move(L));
    fine = std::move(coarse);
    dims = cdims;
  }

  impl_->coarse = current;
  impl_->direct.compute(impl_->coarse);
  if (impl_->direct.info() != Eigen::Success) {
    throw SolverError("singular system: coarse-grid factorization failed");
  }
  // Pivots of an SPD operator are positive; a zero or negative one means a free mode.
  if ((impl_->direct.vectorD().array() <= 0.0).any()) {
    throw SolverError("singular system: coarse operator is not positive definite");
  }
}

MultigridSolver::~MultigridSolver() = default;
MultigridSolver::MultigridSolver(MultigridSolver&&) noexcept = default;
MultigridSolver& MultigridSolver::operator=(MultigridSolver&&) noexcept = default;

int MultigridSolver::level_count() const { return static_cast<int>(impl_->levels.size()) + 1; }

std::size_t MultigridSolver::unknowns(int level) const {
  if (level < static_cast<int>(impl_->levels.size())) return static_cast<std::size_t>(impl_->levels[level].A.rows());
  return static_cast<std::size_t>(impl_->coarse.rows());
}

SolveReport MultigridSolver::solve(const Eigen::VectorXd& b, Eigen::VectorXd& x, double rel_tol,
                                   int max_iterations) const {
  SolveReport rep;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    return rep;
  }
  auto apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return impl_->levels.empty() ? Eigen::VectorXd(impl_->coarse * v) : Eigen::VectorXd(impl_->levels[0].A * v);
  };
  if (x.size() != b.size()) x = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b - apply(x);
  rep.relative_residual = r.norm() / bnorm;
  if (rep.relative_residual <= rel_tol) return rep;

  Eigen::VectorXd z = impl_->vcycle(0, r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::VectorXd Ap = apply(p);
    const double alpha = rz / p.dot(Ap);
    x += alpha * p;
    r -= alpha * Ap;
    rep.iterations = it;
    rep.relative_residual = r.norm() / bnorm;
    if (rep.relative_residual <= rel_tol) {
      // Confirm against the true residual; recurrence drift is rare but possible.
      rep.relative_residual = (b - apply(x)).norm() / bnorm;
      if (rep.relative_residual <= rel_tol) return rep;
      r = b - apply(x);
    }
    z = impl_->vcycle(0, r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  std::ostringstream msg;
  msg << "non-convergence: multigrid CG relative residual " << rep.relative_residual << " after "
      << rep.iterations << " iterations (tolerance " << rel_tol << ")";
  throw SolverError(msg.str());
}

}  // namespace ovsim
