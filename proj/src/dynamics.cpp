#include "phasefrac/dynamics.hpp"

#include "phasefrac/vtk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <stdexcept>

namespace phasefrac {

std::pair<Eigen::VectorXd, Eigen::VectorXd> backward_euler_kinematics(
    const Eigen::VectorXd& u_new, const Eigen::VectorXd& u_old, const Eigen::VectorXd& v_old,
    double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  Eigen::VectorXd v = (u_new - u_old) / dt;
  Eigen::VectorXd a = (v - v_old) / dt;
  return {std::move(v), std::move(a)};
}

double rayleigh_wave_speed(double E, double nu, double rho) {
  if (!(E > 0.0) || !(rho > 0.0) || nu < 0.0 || nu >= 0.5)
    throw std::invalid_argument("invalid elastic constants for the wave speed");
  const double vs = std::sqrt(E / (2.0 * (1.0 + nu)) / rho);
  return vs * (0.862 + 1.14 * nu) / (1.0 + nu);
}

double rayleigh_wave_speed(const MaterialParams& m) {
  // MPa -> Pa, tonne/mm^3 -> kg/m^3, m/s -> mm/s
  return 1e3 * rayleigh_wave_speed(m.E * 1e6, m.nu, m.rho * 1e12);
}

DynamicResult run_dynamic_program(const Problem& p, const DynamicProgram& prog,
                                  const RunOptions& options) {
  if (!(prog.dt > 0.0) || !(prog.total_time > 0.0))
    throw std::invalid_argument("dynamic program needs positive dt and total time");
  if (!(p.params().rho > 0.0)) throw std::invalid_argument("dynamic runs need a positive density");

  DynamicResult out;
  const double vr = rayleigh_wave_speed(p.params());
  const double he = p.mesh().min_element_size();
  if (prog.dt > 2.0 * he / vr) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "dt = %.3g s exceeds 2 he / v_r = %.3g s", prog.dt,
                  2.0 * he / vr);
    out.warning = buf;
  }

  const SparseMatrix M = p.assembler().mass_matrix();
  const Eigen::VectorXd f_ext =
      p.external.size() > 0 ? p.external : Eigen::VectorXd::Zero(2 * p.mesh().num_nodes());
  double work = 0.0;

  if (!prog.snapshot_dir.empty()) std::filesystem::create_directories(prog.snapshot_dir);
  auto snapshot = [&](int inc, const SolutionState& s) {
    if (prog.snapshot_dir.empty()) return;
    std::vector<double> H(s.ip.size());
    for (std::size_t i = 0; i < H.size(); ++i) H[i] = s.ip[i].H;
    char name[64];
    std::snprintf(name, sizeof name, "state_%06d.vtk", inc);
    const std::string path = (std::filesystem::path(prog.snapshot_dir) / name).string();
    write_vtk(path, p.mesh(), s.u, s.phi, p.assembler().element_mean(H));
    out.snapshots.push_back(path);
  };

  RunOptions opt = options;
  opt.dynamic = true;
  opt.adaptive.enabled = false;
  auto user_observer = options.observer;
  opt.observer = [&](const IncrementEvent& ev) {
    const SolutionState& s = *ev.after;
    work += f_ext.dot(s.u - ev.before->u);
    EnergyRecord rec;
    rec.increment = ev.increment;
    rec.time = s.time;
    rec.kinetic = 0.5 * s.v.dot(M * s.v);
    rec.strain = p.assembler().strain_energy(s.u, s.phi);
    rec.external_work = work;
    const double scale = std::max({std::abs(work), rec.kinetic + rec.strain, 1e-300});
    if (rec.kinetic + rec.strain > work + 1e-9 * scale) out.energy_bounded = false;
    out.energy.push_back(rec);
    if (prog.snapshot_every > 0 && ev.increment % prog.snapshot_every == 0) snapshot(ev.increment, s);
    if (user_observer) user_observer(ev);
  };

  LoadProgram lp;
  lp.t_end = prog.total_time;
  lp.dt_ref = prog.dt;
  lp.fixed_dt = true;
  lp.displacement_factor = [](double) { return 0.0; };
  lp.force_factor = [](double) { return 1.0; };

  out.run = run_load_program(p, lp, opt, p.initial_state(true));
  const int last = out.run.log.records.empty() ? 0 : out.run.log.records.back().increment;
  if (prog.snapshot_every <= 0 || last % prog.snapshot_every != 0 || !out.run.completed)
    snapshot(last, out.run.final_state);
  return out;
}

std::pair<int, int> count_crack_branches(const Mesh& mesh, const Eigen::VectorXd& phi,
                                         double y_crack, double offset, double threshold) {
  const int nn = mesh.num_nodes();
  std::vector<int> parent(nn);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  // side: +1 above, -1 below, 0 not counted
  auto side = [&](int n) {
    if (phi(n) < threshold) return 0;
    const double d = mesh.nodes[n].y - y_crack;
    return d > offset ? 1 : (d < -offset ? -1 : 0);
  };
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto conn = mesh.element(e);
    for (std::size_t a = 0; a < conn.size(); ++a)
      for (std::size_t b = a + 1; b < conn.size(); ++b) {
        const int sa = side(conn[a]);
        if (sa != 0 && sa == side(conn[b])) parent[find(conn[a])] = find(conn[b]);
      }
  }
  int upper = 0, lower = 0;
  for (int n = 0; n < nn; ++n) {
    if (find(n) != n) continue;
    const int s = side(n);
    if (s > 0) ++upper;
    if (s < 0) ++lower;
  }
  return {upper, lower};
}

}  // namespace phasefrac
