#include "phasefrac/convergence.hpp"

namespace phasefrac {

double max_abs(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

FieldVerdict check_field(const FieldStats& s, const ConvergenceCriteria& c) {
  FieldVerdict v;
  v.stats = s;
  // r = 0 passes even without flux; a residual with zero flux never does
  v.residual_ok = s.r_max == 0.0 || (s.q_tilde > 0.0 && s.r_max <= c.Rn * s.q_tilde);
  const bool linear = s.r_max == 0.0 || (s.q_tilde > 0.0 && s.r_max <= c.linear_Rn * s.q_tilde);
  v.correction_ok = linear || s.c_max <= c.Cn * s.da_max;
  return v;
}

ConvergenceVerdict check_convergence(const FieldStats& u, const FieldStats& phi,
                                     const ConvergenceCriteria& c) {
  return {check_field(u, c), check_field(phi, c)};
}

}  // namespace phasefrac
