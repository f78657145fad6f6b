#include "phasefrac/load_program.hpp"

#include "phasefrac/dynamics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace phasefrac {

void LoadProgram::validate() const {
  if (!(t_end > 0.0)) throw std::invalid_argument("program end time must be positive");
  if (!(dt_ref > 0.0)) throw std::invalid_argument("reference increment must be positive");
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
    throw std::invalid_argument("breakpoints must be sorted");
}

double state_reaction(const Problem& p, const Eigen::VectorXd& internal_u) {
  if (p.reaction_nodes.empty() || internal_u.size() == 0) return 0.0;
  return reaction(internal_u, p.reaction_nodes, p.reaction_component);
}

double state_crack_length(const Problem& p, const SolutionState& s) {
  return p.ligament ? crack_length(s.phi, p.mesh(), *p.ligament) : 0.0;
}

namespace {

void update_fatigue(const Problem& p, SolutionState& s) {
  const auto energies = p.assembler().ip_energies(s.u);
  const auto phase = p.assembler().ip_phase(s.phi);
  for (std::size_t i = 0; i < s.ip.size(); ++i) {
    const double alpha = degradation(phase[i]) * energies[i].psi_plus;
    s.ip[i].alpha_bar = accumulate_fatigue(alpha, s.ip[i].alpha, s.ip[i].alpha_bar);
    s.ip[i].alpha = alpha;
  }
}

}  // namespace

RunResult run_load_program(const Problem& p, const LoadProgram& prog, const RunOptions& opt,
                           SolutionState state) {
  prog.validate();
  opt.solver.validate();
  if (opt.fatigue) opt.fatigue->validate();
  const auto t0 = std::chrono::steady_clock::now();

  auto disp_factor = [&](double t) {
    return prog.displacement_factor ? prog.displacement_factor(t) : t / prog.t_end;
  };
  auto force_factor = [&](double t) { return prog.force_factor ? prog.force_factor(t) : 1.0; };

  IncrementController ctl(prog.dt_ref, opt.adaptive);
  ctl.growth_factor = prog.fixed_dt ? 1.0 : opt.growth_factor;
  ctl.growth_iterations = opt.growth_iterations;
  ctl.cutback_factor = opt.cutback_factor;
  ctl.max_cutbacks = prog.fixed_dt ? 0 : opt.max_cutbacks;

  RunResult out;
  FluxHistory flux;
  long long cum = 0;
  int increment = 0;
  double t = state.time;
  const double eps = 1e-12 * prog.t_end;
  std::vector<double> f_ip;

  while (t < prog.t_end - eps) {
    if (increment >= opt.max_increments) {
      out.abort_reason = "increment limit reached";
      break;
    }
    double dt = std::min(ctl.dt(), prog.t_end - t);
    auto bp = std::upper_bound(prog.breakpoints.begin(), prog.breakpoints.end(), t + eps);
    if (bp != prog.breakpoints.end() && t + dt > *bp - eps) dt = *bp - t;
    double t_new = t + dt;
    if (std::abs(prog.t_end - t_new) <= eps) t_new = prog.t_end;
    if (bp != prog.breakpoints.end() && std::abs(*bp - t_new) <= eps) t_new = *bp;

    StepContext step;
    step.displacement_factor = disp_factor(t_new);
    step.force_factor = force_factor(t_new);
    InertiaContext inertia;
    if (opt.dynamic) {
      inertia.dt = dt;
      inertia.u_prev = &state.u;
      inertia.v_prev = &state.v;
      step.inertia = &inertia;
    }
    if (opt.fatigue) {
      f_ip.resize(state.ip.size());
      for (std::size_t i = 0; i < f_ip.size(); ++i)
        f_ip[i] = fatigue_degradation(state.ip[i].alpha_bar, *opt.fatigue);
      step.fatigue = f_ip;
    }

    IncrementResult res = solve_increment(p, state, step, opt.solver, flux);
    cum += res.iterations;
    if (opt.verbose)
      std::fprintf(stderr, "inc %d t=%.6g dt=%.3g iters=%d %s r_u=%.3g/%.3g r_phi=%.3g/%.3g %s\n",
                   increment + 1, t_new, dt, res.iterations, res.converged ? "ok" : "FAIL",
                   res.verdict.u.stats.r_max, res.verdict.u.stats.q_tilde,
                   res.verdict.phi.stats.r_max, res.verdict.phi.stats.q_tilde, res.message.c_str());
    out.skipped_pairs += res.skipped_pairs;
    if (!res.converged) {
      ++out.failed_attempts;
      if (!ctl.on_failure()) {
        out.abort_reason = "increment " + std::to_string(increment + 1) + " at t=" +
                           format_double(t_new) + " failed: " + res.message;
        break;
      }
      continue;
    }

    if (ctl.adaptive_enabled() && !ctl.already_triggered()) {
      const auto before = p.assembler().ip_phase(state.phi);
      const auto after = p.assembler().ip_phase(res.state.phi);
      if (adaptive_step_check(before, after, ctl, dt) == StepDecision::Restart) {
        ++out.adaptive_restarts;
        out.restart_increment = increment + 1;
        out.dt_before_restart = dt;
        out.dt_after_restart = ctl.dt();
        continue;
      }
    }

    SolutionState next = std::move(res.state);
    next.time = t_new;
    if (opt.dynamic) std::tie(next.v, next.a) = backward_euler_kinematics(next.u, state.u, state.v, dt);
    if (opt.fatigue) update_fatigue(p, next);
    flux.u.commit(res.flux_u);
    flux.phi.commit(res.flux_phi);

    ++increment;
    RunRecord rec;
    rec.increment = increment;
    rec.time = t_new;
    rec.dt = dt;
    rec.iterations = res.iterations;
    rec.cum_iterations = cum;
    rec.u_applied_mm = p.control_displacement * step.displacement_factor;
    rec.reaction_N = state_reaction(p, res.internal_u);
    rec.crack_length_mm = state_crack_length(p, next);
    out.log.records.push_back(rec);

    if (opt.observer) {
      IncrementEvent ev{increment, dt, &state, &next, &res, &out.log.records.back()};
      opt.observer(ev);
    }
    state = std::move(next);
    t = t_new;
    ctl.on_converged(res.iterations);
    if (opt.stop_when && opt.stop_when(state, rec)) break;
  }
  out.completed = out.abort_reason.empty();
  out.final_state = std::move(state);
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace phasefrac
