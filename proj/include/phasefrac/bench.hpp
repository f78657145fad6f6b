#pragma once

#include "phasefrac/config.hpp"
#include "phasefrac/cyclic.hpp"
#include "phasefrac/dynamics.hpp"
#include "phasefrac/load_program.hpp"
#include "phasefrac/model.hpp"

#include <memory>
#include <string>
#include <vector>

namespace phasefrac {

Mesh build_mesh(const RunSpec& spec);
std::unique_ptr<Problem> build_problem(const RunSpec& spec);
/// Quasi-static ramp of the spec (sent, shear, custom).
LoadProgram build_ramp(const RunSpec& spec);
RunOptions build_options(const RunSpec& spec);
CyclicProgram build_cyclic(const RunSpec& spec);
DynamicProgram build_dynamic(const RunSpec& spec, const Problem& problem);

/// Short text identifying the mesh and case; runs are comparable only when
/// their signatures agree.
std::string mesh_signature(const RunSpec& spec, const Problem& problem);

struct CaseResult {
  RunSpec spec;
  RunResult run;
  int num_dofs = 0;
  std::string signature;
  std::vector<CycleRecord> curve;        // fatigue
  int cycles_to_failure = -1;            // fatigue
  std::vector<EnergyRecord> energy;      // dynamic
  bool energy_bounded = true;            // dynamic
  int branches_upper = 0;                // dynamic
  int branches_lower = 0;                // dynamic
  long long history_violations = 0;      // integration points where H decreased
  std::vector<std::string> files;
};

/// Runs the case. With write_outputs the CSV logs, summary.json, the final
/// VTK state and the effective config are written to spec.out_dir.
CaseResult run_case(const RunSpec& spec, bool write_outputs = true, bool verbose = false);

struct RunSummary {
  std::string dir;
  std::string case_name;
  std::string scheme;
  std::string signature;
  int increments = 0;
  long long cum_iterations = 0;
  double wall_seconds = 0.0;
  double peak_force = 0.0;
  double critical_displacement = 0.0;
  double final_crack_length = 0.0;
  bool completed = false;
};

RunSummary summarize(const CaseResult& result, const std::string& dir = "");
void write_summary(const std::string& path, const RunSummary& summary);
RunSummary read_summary(const std::string& path);

struct ComparisonReport {
  std::vector<RunSummary> runs;
  /// Relative to the first run: baseline / run for iterations and time.
  std::vector<double> iteration_ratio;
  std::vector<double> time_ratio;
  std::string text() const;
  std::string csv() const;
};

/// Throws std::invalid_argument on fewer than two runs or when the case or
/// mesh signatures differ.
ComparisonReport compare_schemes(const std::vector<RunSummary>& runs);
/// Reads summary.json from each run directory.
ComparisonReport compare_run_dirs(const std::vector<std::string>& dirs);

}  // namespace phasefrac
