#pragma once

#include "phasefrac/mesh.hpp"
#include "phasefrac/model.hpp"

#include <Eigen/Dense>

#include <limits>

namespace phasefrac {

struct FatigueParams {
  double alpha_T = std::numeric_limits<double>::infinity();  // MPa
  int exponent = 1;
  void validate() const;
};

/// alpha_bar + max(alpha_new - alpha_prev, 0)
double accumulate_fatigue(double alpha_new, double alpha_prev, double alpha_bar_prev);

/// 1 up to the threshold, then (2 alpha_T / (alpha_bar + alpha_T))^p.
double fatigue_degradation(double alpha_bar, const FatigueParams& params);

/// Distance from the tip to the farthest ligament node with phi >= threshold,
/// 0 if there is none.
double crack_length(const Eigen::VectorXd& phi, const Mesh& mesh, const Ligament& ligament,
                    double threshold = 0.95);

}  // namespace phasefrac
