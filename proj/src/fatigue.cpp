#include "phasefrac/fatigue.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phasefrac {

void FatigueParams::validate() const {
  if (!(alpha_T > 0.0)) throw std::invalid_argument("fatigue threshold alpha_T must be positive");
  if (exponent != 1 && exponent != 2)
    throw std::invalid_argument("fatigue exponent must be 1 or 2");
}

double accumulate_fatigue(double alpha_new, double alpha_prev, double alpha_bar_prev) {
  return alpha_bar_prev + std::max(alpha_new - alpha_prev, 0.0);
}

double fatigue_degradation(double alpha_bar, const FatigueParams& params) {
  if (alpha_bar <= params.alpha_T) return 1.0;
  const double f = 2.0 * params.alpha_T / (alpha_bar + params.alpha_T);
  return params.exponent == 1 ? f : f * f;
}

double crack_length(const Eigen::VectorXd& phi, const Mesh& mesh, const Ligament& ligament,
                    double threshold) {
  double a = 0.0;
  for (int n : ligament.nodes) {
    if (phi(n) < threshold) continue;
    const auto& p = mesh.nodes[n];
    a = std::max(a, std::hypot(p.x - ligament.tip.x, p.y - ligament.tip.y));
  }
  return a;
}

}  // namespace phasefrac
