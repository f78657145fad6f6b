#include "phasefrac/linear_solver.hpp"

#include <cmath>
#include <string>

namespace phasefrac {

namespace {

// A couple of refinement sweeps recover the accuracy lost on nearly broken
// elements, where the residual stiffness k makes the block ill-conditioned.
constexpr int kRefinementSteps = 3;

}  // namespace

void SpdFactor::factor(const SparseMatrix& K) {
  if (K.rows() != K.cols()) throw SolverError("tangent block is not square");
  n_ = static_cast<int>(K.rows());
  K_copy_ = K;
  K_ = &K_copy_;
  if (n_ == 0) return;
  if (!llt_ || pattern_nnz_ != K.nonZeros()) {
    llt_ = std::make_unique<Llt>();
    llt_->analyzePattern(K_copy_);
    pattern_nnz_ = K.nonZeros();
  }
  llt_->factorize(K_copy_);
  if (llt_->info() != Eigen::Success)
    throw SolverError("Cholesky factorization failed: tangent block of size " +
                      std::to_string(n_) + " is not positive definite");
}

Eigen::VectorXd SpdFactor::solve(const Eigen::VectorXd& b) const {
  if (b.size() != n_) throw SolverError("right-hand side size mismatch");
  if (n_ == 0) return Eigen::VectorXd();
  Eigen::VectorXd x = llt_->solve(b);
  const double bnorm = b.norm();
  for (int it = 0; it < kRefinementSteps; ++it) {
    const Eigen::VectorXd r = b - (*K_) * x;
    if (r.norm() <= 1e-12 * bnorm) break;
    x += llt_->solve(r);
  }
  if (!x.allFinite()) throw SolverError("linear solve produced non-finite values");
  return x;
}

void BlockFactor::factor_u(const SparseMatrix& K_uu) { u_.factor(K_uu); }
void BlockFactor::factor_phi(const SparseMatrix& K_phiphi) { phi_.factor(K_phiphi); }

Eigen::VectorXd BlockFactor::solve(const Eigen::VectorXd& b) const {
  const int nu = u_.size();
  const int np = phi_.size();
  if (b.size() != nu + np) throw SolverError("right-hand side size mismatch");
  Eigen::VectorXd x(nu + np);
  if (nu > 0) x.head(nu) = u_.solve(b.head(nu));
  if (np > 0) x.tail(np) = phi_.solve(b.tail(np));
  return x;
}

Eigen::VectorXd solve_linear(const SparseSystem& system) {
  const auto n = system.K.rows();
  if (system.K.cols() != n || system.R.size() != n)
    throw SolverError("inconsistent system dimensions");
  if (n == 0) return Eigen::VectorXd();
  SpdFactor f;
  f.factor(system.K);
  Eigen::VectorXd x = f.solve(system.R);
  const double res = (system.K * x - system.R).norm();
  if (res > 1e-10 * system.R.norm())
    throw SolverError("linear solve residual " + std::to_string(res) +
                      " exceeds 1e-10 relative to ||R|| = " + std::to_string(system.R.norm()));
  return x;
}

}  // namespace phasefrac
