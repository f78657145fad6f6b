#pragma once

#include "phasefrac/fatigue.hpp"
#include "phasefrac/model.hpp"
#include "phasefrac/run_log.hpp"
#include "phasefrac/solvers.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace phasefrac {

/// Pseudo-time (or physical time) program. Ramped Dirichlet values are
/// multiplied by displacement_factor(t), external forces by force_factor(t).
struct LoadProgram {
  double t_end = 1.0;
  double dt_ref = 0.01;
  std::function<double(double)> displacement_factor;  // defaults to t / t_end
  std::function<double(double)> force_factor;         // defaults to 1
  /// Times the stepping must land on exactly (sorted).
  std::vector<double> breakpoints;
  bool fixed_dt = false;
  void validate() const;
};

struct IncrementEvent {
  int increment = 0;
  double dt = 0.0;
  const SolutionState* before = nullptr;
  const SolutionState* after = nullptr;
  const IncrementResult* result = nullptr;
  const RunRecord* record = nullptr;
};

struct RunOptions {
  SolverConfig solver;
  AdaptiveConfig adaptive;
  double growth_factor = 1.5;
  int growth_iterations = 5;
  double cutback_factor = 0.5;
  int max_cutbacks = 5;
  bool dynamic = false;
  std::optional<FatigueParams> fatigue;
  int max_increments = 1000000;
  /// Prints one line per attempt to stderr.
  bool verbose = false;
  /// Called after every accepted increment.
  std::function<void(const IncrementEvent&)> observer;
  /// Stops the run early (successfully) when it returns true.
  std::function<bool(const SolutionState&, const RunRecord&)> stop_when;
};

struct RunResult {
  RunLog log;
  SolutionState final_state;
  bool completed = false;
  std::string abort_reason;
  int adaptive_restarts = 0;
  int restart_increment = -1;   // increment number that was restarted
  double dt_before_restart = 0.0;
  double dt_after_restart = 0.0;
  int failed_attempts = 0;
  int skipped_pairs = 0;
  double wall_seconds = 0.0;
};

RunResult run_load_program(const Problem& problem, const LoadProgram& program,
                           const RunOptions& options, SolutionState initial);

/// Reaction and crack length of a state, as logged.
double state_reaction(const Problem& problem, const Eigen::VectorXd& internal_u);
double state_crack_length(const Problem& problem, const SolutionState& state);

}  // namespace phasefrac
