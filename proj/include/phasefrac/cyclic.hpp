#pragma once

#include "phasefrac/fatigue.hpp"
#include "phasefrac/load_program.hpp"

#include <string>
#include <vector>

namespace phasefrac {

/// Triangular displacement cycles between R * amplitude and amplitude.
/// Time is measured in cycles; the first peak is at t = 1/4.
struct CyclicProgram {
  double amplitude = 0.002;  // mm
  double load_ratio = -1.0;
  int increments_per_cycle = 4;
  int max_cycles = 100;
  /// The run stops once a peak-state crack length reaches this value.
  double failure_crack_length = 0.0;
  void validate() const;
  /// Applied displacement at time t.
  double displacement(double t) const;
};

struct CycleRecord {
  int cycle = 0;
  double a_mm = 0.0;
  long long cum_iterations = 0;
  double wall_seconds = 0.0;
  bool operator==(const CycleRecord&) const = default;
};

struct CyclicResult {
  RunResult run;
  std::vector<CycleRecord> curve;
  int cycles_to_failure = -1;  // -1 if the ligament did not fail
};

/// The problem's ramped Dirichlet values are taken as the amplitude.
CyclicResult run_cyclic_program(const Problem& problem, const CyclicProgram& program,
                                const FatigueParams& fatigue, const RunOptions& options);

void write_an_csv(const std::string& path, const std::vector<CycleRecord>& curve);
std::vector<CycleRecord> read_an_csv(const std::string& path);

}  // namespace phasefrac
