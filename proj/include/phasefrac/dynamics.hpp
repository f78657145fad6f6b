#pragma once

#include "phasefrac/load_program.hpp"

#include <string>
#include <utility>

namespace phasefrac {

/// v = (u - u_old)/dt, a = (v - v_old)/dt
std::pair<Eigen::VectorXd, Eigen::VectorXd> backward_euler_kinematics(
    const Eigen::VectorXd& u_new, const Eigen::VectorXd& u_old, const Eigen::VectorXd& v_old,
    double dt);

/// SI units: E in Pa, rho in kg/m^3, result in m/s.
double rayleigh_wave_speed(double E, double nu, double rho);
/// Same in the solver units (MPa, tonne/mm^3), result in mm/s.
double rayleigh_wave_speed(const MaterialParams& params);

struct EnergyRecord {
  int increment = 0;
  double time = 0.0;
  double kinetic = 0.0;
  double strain = 0.0;
  double external_work = 0.0;
};

struct DynamicProgram {
  double dt = 0.0;          // s
  double total_time = 0.0;  // s
  int snapshot_every = 25;
  std::string snapshot_dir;  // empty: no VTK output
};

struct DynamicResult {
  RunResult run;
  std::vector<EnergyRecord> energy;
  bool energy_bounded = true;  // kinetic + strain <= external work at every step
  std::vector<std::string> snapshots;
  std::string warning;
};

/// Fixed-step implicit dynamics under the problem's external forces (step
/// load). Non-convergence aborts the run.
DynamicResult run_dynamic_program(const Problem& problem, const DynamicProgram& program,
                                  const RunOptions& options);

/// Counts crack tips: connected groups of damaged nodes (phi >= threshold)
/// that lie at least `offset` above or below the line y = y_crack,
/// returned as (upper, lower).
std::pair<int, int> count_crack_branches(const Mesh& mesh, const Eigen::VectorXd& phi,
                                         double y_crack, double offset,
                                         double threshold = 0.95);

}  // namespace phasefrac
