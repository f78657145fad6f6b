#pragma once

#include "phasefrac/assembly.hpp"
#include "phasefrac/convergence.hpp"
#include "phasefrac/model.hpp"

#include <span>
#include <string>
#include <vector>

namespace phasefrac {

enum class Scheme { MonolithicBfgs, MonolithicNewton, Staggered };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme scheme);

struct SolverConfig {
  Scheme scheme = Scheme::MonolithicBfgs;
  ConvergenceCriteria criteria;
  int max_iterations = 16;
  bool line_search = true;
  int bfgs_max_updates = 8;
  double line_search_factor = 0.5;
  int line_search_trials = 4;
  void validate() const;
};

/// Loading of one increment.
struct StepContext {
  double displacement_factor = 0.0;  // scales ramped Dirichlet values
  double force_factor = 0.0;         // scales Problem::external
  const InertiaContext* inertia = nullptr;
  std::span<const double> fatigue;   // per integration point f, empty means 1
};

/// Time-averaged flux bookkeeping for both fields.
struct FluxHistory {
  FluxTracker u;
  FluxTracker phi;
};

struct IncrementResult {
  bool converged = false;
  int iterations = 0;
  SolutionState state;
  Eigen::VectorXd internal_u;  // internal (+ inertial) nodal forces at the solution
  double flux_u = 0.0;
  double flux_phi = 0.0;
  ConvergenceVerdict verdict;
  int skipped_pairs = 0;
  std::string message;
};

IncrementResult solve_increment_monolithic(const Problem& problem, const SolutionState& converged,
                                           const StepContext& step, const SolverConfig& config,
                                           const FluxHistory& flux);

IncrementResult solve_increment_staggered(const Problem& problem, const SolutionState& converged,
                                          const StepContext& step, const SolverConfig& config,
                                          const FluxHistory& flux);

IncrementResult solve_increment(const Problem& problem, const SolutionState& converged,
                                const StepContext& step, const SolverConfig& config,
                                const FluxHistory& flux);

struct AdaptiveConfig {
  bool enabled = false;
  double phi_trigger = 0.7;
  double dphi_trigger = 0.5;
  double reduction = 0.1;
};

enum class StepDecision { Accept, Restart };

/// Increment size control: growth after easy increments, cutback after
/// failures and the one-shot adaptive reduction.
class IncrementController {
public:
  IncrementController(double dt_reference, const AdaptiveConfig& adaptive = {});

  double dt_reference() const { return dt_ref_; }
  double dt() const { return dt_; }
  bool adaptive_enabled() const { return adaptive_.enabled; }
  const AdaptiveConfig& adaptive() const { return adaptive_; }
  bool already_triggered() const { return triggered_; }
  int cutbacks() const { return cutbacks_; }

  double growth_factor = 1.5;
  int growth_iterations = 5;
  double cutback_factor = 0.5;
  int max_cutbacks = 5;

  /// Grows dt when the increment was cheap and resets the cutback count.
  void on_converged(int iterations);
  /// Halves dt; false once the cutback budget is exhausted.
  bool on_failure();
  /// Applies the adaptive reduction to the attempted increment size.
  void trigger_reduction(double attempted_dt);

private:
  double dt_ref_;
  double dt_;
  AdaptiveConfig adaptive_;
  bool triggered_ = false;
  int cutbacks_ = 0;
};

/// Restart iff some point has phi_prev < 0.7 and phi_new - phi_prev >= 0.5,
/// and the reduction has not fired yet. On restart the controller's dt
/// becomes reduction * attempted_dt.
StepDecision adaptive_step_check(std::span<const double> phi_prev, std::span<const double> phi_new,
                                 IncrementController& controller, double attempted_dt);

}  // namespace phasefrac
