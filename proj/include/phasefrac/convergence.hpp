#pragma once

#include <Eigen/Dense>

namespace phasefrac {

struct ConvergenceCriteria {
  double Rn = 0.005;
  double Cn = 0.01;
  /// A residual this far below the flux is accepted without the correction
  /// test. Linear increments then converge after a single solve.
  double linear_Rn = 1e-8;
};

/// Inputs of the convergence test for one field.
struct FieldStats {
  double r_max = 0.0;    // largest residual entry
  double q_tilde = 0.0;  // time-averaged flux
  double c_max = 0.0;    // largest entry of the last correction
  double da_max = 0.0;   // largest change of the field within the increment
};

struct FieldVerdict {
  FieldStats stats;
  bool residual_ok = false;
  bool correction_ok = false;
  bool converged() const { return residual_ok && correction_ok; }
};

struct ConvergenceVerdict {
  FieldVerdict u;
  FieldVerdict phi;
  bool converged() const { return u.converged() && phi.converged(); }
};

FieldVerdict check_field(const FieldStats& stats, const ConvergenceCriteria& criteria);
ConvergenceVerdict check_convergence(const FieldStats& u, const FieldStats& phi,
                                     const ConvergenceCriteria& criteria);

/// Running time average of the spatially averaged flux of one field.
class FluxTracker {
public:
  /// q~ including the current iterate's flux.
  double q_tilde(double current) const { return (sum_ + current) / (count_ + 1); }
  /// Records the flux of a converged increment.
  void commit(double flux) {
    sum_ += flux;
    ++count_;
  }
  int count() const { return count_; }

private:
  double sum_ = 0.0;
  int count_ = 0;
};

double max_abs(const Eigen::Ref<const Eigen::VectorXd>& v);

}  // namespace phasefrac
