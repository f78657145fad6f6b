#include "phasefrac/bfgs.hpp"

#include <stdexcept>

namespace phasefrac {

bool BfgsInverse::add_pair(const Eigen::VectorXd& s, const Eigen::VectorXd& y) {
  if (s.size() != y.size()) throw std::invalid_argument("BFGS pair size mismatch");
  const double sy = s.dot(y);
  if (!(sy > 0.0)) {
    ++skipped_;
    return false;
  }
  s_.push_back(s);
  y_.push_back(y);
  rho_.push_back(1.0 / sy);
  return true;
}

Eigen::VectorXd BfgsInverse::apply(const Eigen::VectorXd& r) const {
  const int m = num_pairs();
  std::vector<double> a(m);
  Eigen::VectorXd q = r;
  for (int i = m - 1; i >= 0; --i) {
    a[i] = rho_[i] * s_[i].dot(q);
    q -= a[i] * y_[i];
  }
  Eigen::VectorXd x = base_(q);
  for (int i = 0; i < m; ++i) {
    const double b = rho_[i] * y_[i].dot(x);
    x += (a[i] - b) * s_[i];
  }
  return x;
}

void BfgsInverse::reset(InverseOperator base) {
  base_ = std::move(base);
  clear();
}

void BfgsInverse::clear() {
  s_.clear();
  y_.clear();
  rho_.clear();
}

Eigen::VectorXd bfgs_apply_inverse(
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& pairs,
    const InverseOperator& base, const Eigen::VectorXd& r, int* skipped) {
  BfgsInverse op(base);
  for (const auto& [s, y] : pairs) op.add_pair(s, y);
  if (skipped) *skipped = op.num_skipped();
  return op.apply(r);
}

}  // namespace phasefrac
