#include "phasefrac/cyclic.hpp"

#include "phasefrac/run_log.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace phasefrac {

void CyclicProgram::validate() const {
  if (!(amplitude > 0.0)) throw std::invalid_argument("cyclic amplitude must be positive");
  if (load_ratio > 1.0) throw std::invalid_argument("load ratio must not exceed 1");
  if (increments_per_cycle < 4 || increments_per_cycle % 4 != 0)
    throw std::invalid_argument("increments per cycle must be a positive multiple of 4");
  if (max_cycles < 1) throw std::invalid_argument("max_cycles must be positive");
}

double CyclicProgram::displacement(double t) const {
  const double frac = t - std::floor(t);
  double tri;
  if (frac <= 0.25)
    tri = 4.0 * frac;
  else if (frac <= 0.75)
    tri = 2.0 - 4.0 * frac;
  else
    tri = 4.0 * frac - 4.0;
  const double mean = 0.5 * (1.0 + load_ratio) * amplitude;
  const double half = 0.5 * (1.0 - load_ratio) * amplitude;
  return mean + half * tri;
}

CyclicResult run_cyclic_program(const Problem& p, const CyclicProgram& prog,
                                const FatigueParams& fatigue, const RunOptions& options) {
  prog.validate();
  fatigue.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const int ipc = prog.increments_per_cycle;

  LoadProgram lp;
  lp.t_end = prog.max_cycles;
  lp.dt_ref = 1.0 / ipc;
  lp.displacement_factor = [&prog](double t) { return prog.displacement(t) / prog.amplitude; };
  lp.breakpoints.reserve(static_cast<std::size_t>(prog.max_cycles) * ipc);
  for (long k = 1; k <= static_cast<long>(prog.max_cycles) * ipc; ++k)
    lp.breakpoints.push_back(static_cast<double>(k) / ipc);

  CyclicResult out;
  RunOptions opt = options;
  opt.fatigue = fatigue;
  opt.adaptive.enabled = false;
  auto is_peak = [](double t, int& cycle) {
    const double c = t - 0.25;
    const double r = std::round(c);
    if (std::abs(c - r) > 1e-9) return false;
    cycle = static_cast<int>(r) + 1;
    return true;
  };
  auto user_stop = options.stop_when;
  opt.stop_when = [&](const SolutionState& s, const RunRecord& rec) {
    int cycle = 0;
    if (is_peak(rec.time, cycle)) {
      CycleRecord cr;
      cr.cycle = cycle;
      cr.a_mm = rec.crack_length_mm;
      cr.cum_iterations = rec.cum_iterations;
      cr.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out.curve.push_back(cr);
      if (prog.failure_crack_length > 0.0 && cr.a_mm >= prog.failure_crack_length) {
        out.cycles_to_failure = cycle;
        return true;
      }
    }
    return user_stop ? user_stop(s, rec) : false;
  };

  SolutionState init = p.initial_state();
  out.run = run_load_program(p, lp, opt, std::move(init));
  return out;
}

void write_an_csv(const std::string& path, const std::vector<CycleRecord>& curve) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "cycle,a_mm,cum_iterations,wall_seconds\n";
  for (const auto& r : curve)
    os << r.cycle << ',' << format_double(r.a_mm) << ',' << r.cum_iterations << ','
       << format_double(r.wall_seconds) << '\n';
}

std::vector<CycleRecord> read_an_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(is, line) || line != "cycle,a_mm,cum_iterations,wall_seconds")
    throw std::runtime_error("a-N file: unexpected header");
  std::vector<CycleRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    CycleRecord r;
    if (!(ls >> r.cycle >> r.a_mm >> r.cum_iterations >> r.wall_seconds))
      throw std::runtime_error("a-N file: malformed line '" + line + "'");
    out.push_back(r);
  }
  return out;
}

}  // namespace phasefrac
