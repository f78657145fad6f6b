#pragma once

#include <Eigen/Dense>

#include <functional>
#include <utility>
#include <vector>

namespace phasefrac {

/// Action of an SPD base inverse, x = K0^{-1} b.
using InverseOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Inverse BFGS operator in two-loop form. Each pair (s, y) holds an
/// iterate change and the matching residual change.
class BfgsInverse {
public:
  explicit BfgsInverse(InverseOperator base) : base_(std::move(base)) {}

  /// Stores the pair unless s.y <= 0, in which case it is skipped and false
  /// is returned.
  bool add_pair(const Eigen::VectorXd& s, const Eigen::VectorXd& y);
  Eigen::VectorXd apply(const Eigen::VectorXd& r) const;

  void reset(InverseOperator base);
  void clear();
  int num_pairs() const { return static_cast<int>(s_.size()); }
  int num_skipped() const { return skipped_; }

private:
  InverseOperator base_;
  std::vector<Eigen::VectorXd> s_;
  std::vector<Eigen::VectorXd> y_;
  std::vector<double> rho_;
  int skipped_ = 0;
};

/// One-shot application of the inverse built from the given pairs (oldest
/// first). Pairs violating the curvature condition are skipped.
Eigen::VectorXd bfgs_apply_inverse(
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& pairs,
    const InverseOperator& base, const Eigen::VectorXd& r, int* skipped = nullptr);

}  // namespace phasefrac
