#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace phasefrac {

struct RunRecord {
  int increment = 0;
  double time = 0.0;
  double dt = 0.0;
  int iterations = 0;
  long long cum_iterations = 0;
  double u_applied_mm = 0.0;
  double reaction_N = 0.0;
  double crack_length_mm = 0.0;

  bool operator==(const RunRecord&) const = default;
};

struct RunLog {
  std::vector<RunRecord> records;

  void write_csv(std::ostream& os) const;
  void write_csv(const std::string& path) const;
  static RunLog read_csv(std::istream& is);
  static RunLog read_csv(const std::string& path);

  long long cum_iterations() const { return records.empty() ? 0 : records.back().cum_iterations; }
  /// Largest reaction and the applied displacement where it occurs.
  double peak_reaction() const;
  double critical_displacement() const;

  bool operator==(const RunLog&) const = default;
};

/// Shortest decimal form that round-trips a double.
std::string format_double(double v);

}  // namespace phasefrac
