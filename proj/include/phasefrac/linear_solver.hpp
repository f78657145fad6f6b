#pragma once

#include "phasefrac/assembly.hpp"

#include <Eigen/SparseCholesky>

#include <memory>
#include <stdexcept>

namespace phasefrac {

class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Sparse Cholesky of one SPD block. The symbolic analysis is kept and
/// reused as long as the sparsity pattern does not change.
class SpdFactor {
public:
  void factor(const SparseMatrix& K);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  int size() const { return n_; }

private:
  using Llt = Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;
  std::unique_ptr<Llt> llt_;
  const SparseMatrix* K_ = nullptr;
  SparseMatrix K_copy_;
  Eigen::Index pattern_nnz_ = -1;
  int n_ = 0;
};

/// Factorization of the block-diagonal tangent diag(K_uu, K_phiphi).
/// Either block may be empty.
class BlockFactor {
public:
  void factor_u(const SparseMatrix& K_uu);
  void factor_phi(const SparseMatrix& K_phiphi);
  int num_u() const { return u_.size(); }
  int num_phi() const { return phi_.size(); }
  /// Solves diag(K_uu, K_phiphi) x = b for the stacked vector b.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

private:
  SpdFactor u_;
  SpdFactor phi_;
};

/// Solves K dz = R. Throws SolverError when the factorization fails or the
/// residual check ||K dz - R|| <= 1e-10 ||R|| cannot be met.
Eigen::VectorXd solve_linear(const SparseSystem& system);

}  // namespace phasefrac
