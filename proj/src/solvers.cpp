#include "phasefrac/solvers.hpp"

#include "phasefrac/bfgs.hpp"
#include "phasefrac/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace phasefrac {

Scheme parse_scheme(const std::string& name) {
  if (name == "monolithic-bfgs" || name == "bfgs") return Scheme::MonolithicBfgs;
  if (name == "monolithic-newton" || name == "newton") return Scheme::MonolithicNewton;
  if (name == "staggered") return Scheme::Staggered;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::MonolithicBfgs: return "monolithic-bfgs";
    case Scheme::MonolithicNewton: return "monolithic-newton";
    case Scheme::Staggered: return "staggered";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (!(criteria.Rn > 0.0 && criteria.Rn < 1.0)) throw std::invalid_argument("Rn must lie in (0, 1)");
  if (!(criteria.Cn > 0.0 && criteria.Cn < 1.0)) throw std::invalid_argument("Cn must lie in (0, 1)");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
  if (bfgs_max_updates < 1) throw std::invalid_argument("bfgs_max_updates must be positive");
  if (!(line_search_factor > 0.0 && line_search_factor < 1.0))
    throw std::invalid_argument("line search factor must lie in (0, 1)");
  if (line_search_trials < 1) throw std::invalid_argument("line search trials must be positive");
}

namespace {

std::vector<double> history_of(const SolutionState& s) {
  std::vector<double> H(s.ip.size());
  for (std::size_t i = 0; i < H.size(); ++i) H[i] = s.ip[i].H;
  return H;
}

double max_change(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

struct Iterate {
  Eigen::VectorXd u;
  Eigen::VectorXd phi;
  AssemblyResult eval;
};

class Evaluator {
public:
  Evaluator(const Problem& p, const StepContext& step, std::span<const double> H_prev)
      : p_(p), step_(step), H_prev_(H_prev) {
    if (p.external.size() > 0 && step.force_factor != 0.0) {
      ext_ = step.force_factor * p.external;
      has_ext_ = true;
    }
  }

  AssemblyResult operator()(const Eigen::VectorXd& u, const Eigen::VectorXd& phi, bool tan_u,
                            bool tan_phi, bool update_history = true) const {
    return (*this)(u, phi, tan_u, tan_phi, update_history, H_prev_);
  }

  AssemblyResult operator()(const Eigen::VectorXd& u, const Eigen::VectorXd& phi, bool tan_u,
                            bool tan_phi, bool update_history,
                            std::span<const double> H) const {
    AssemblyOptions o;
    o.tangent_u = tan_u;
    o.tangent_phi = tan_phi;
    o.update_history = update_history;
    o.fatigue = step_.fatigue;
    o.inertia = step_.inertia;
    o.external = has_ext_ ? &ext_ : nullptr;
    AssemblyResult r = p_.assembler().assemble(u, phi, H, o);
    if (!r.R.allFinite()) throw SolverError("non-finite residual");
    return r;
  }

private:
  const Problem& p_;
  const StepContext& step_;
  std::span<const double> H_prev_;
  Eigen::VectorXd ext_;
  bool has_ext_ = false;
};

double safe(double q) { return q > 0.0 ? q : 1.0; }

// Merit function of the line search: residual norms scaled by the fluxes.
double merit(const AssemblyResult& r, int nu, double qu, double qphi) {
  const double a = r.R.head(nu).norm() / safe(qu);
  const double b = r.R.tail(r.R.size() - nu).norm() / safe(qphi);
  return a * a + b * b;
}

IncrementResult finish(IncrementResult res, const SolutionState& converged, Iterate&& it,
                       const std::vector<double>& H) {
  res.state = converged;
  res.state.u = std::move(it.u);
  res.state.phi = std::move(it.phi);
  for (std::size_t i = 0; i < H.size(); ++i) res.state.ip[i].H = H[i];
  res.internal_u = std::move(it.eval.internal_u);
  return res;
}

}  // namespace

IncrementResult solve_increment_monolithic(const Problem& p, const SolutionState& converged,
                                           const StepContext& step, const SolverConfig& cfg,
                                           const FluxHistory& flux) {
  const DofMap& dofs = p.dofs();
  const int nu = dofs.num_u();
  const int nphi = dofs.num_phi();
  const bool newton = cfg.scheme == Scheme::MonolithicNewton;
  const std::vector<double> H_prev = history_of(converged);
  Evaluator evaluate(p, step, H_prev);

  IncrementResult res;
  Iterate it{converged.u, converged.phi, {}};
  dofs.apply_constraints(step.displacement_factor, it.u, it.phi);
  // The lifted start point concentrates the prescribed increment in the
  // boundary elements, so its strains would pollute H. The first residual
  // uses the converged history instead.
  it.eval = evaluate(it.u, it.phi, true, true, false);

  auto stats = [&](const AssemblyResult& e, const Eigen::VectorXd& dz) {
    FieldStats su{max_abs(e.R.head(nu)), flux.u.q_tilde(e.flux_u),
                  max_abs(dz.head(nu)), max_change(it.u, converged.u)};
    FieldStats sp{max_abs(e.R.tail(nphi)), flux.phi.q_tilde(e.flux_phi),
                  max_abs(dz.tail(nphi)), max_change(it.phi, converged.phi)};
    return check_convergence(su, sp, cfg.criteria);
  };
  auto done = [&](IncrementResult r) {
    r.flux_u = it.eval.flux_u;
    r.flux_phi = it.eval.flux_phi;
    std::vector<double> H = std::move(it.eval.H);
    return finish(std::move(r), converged, std::move(it), H);
  };

  // Nothing to do when the start point already satisfies the linear test,
  // with the history it would commit as well.
  {
    ConvergenceCriteria strict = cfg.criteria;
    strict.Rn = cfg.criteria.linear_Rn;
    auto start_ok = [&](const AssemblyResult& e) {
      FieldStats su{max_abs(e.R.head(nu)), flux.u.q_tilde(e.flux_u), 0.0, 0.0};
      FieldStats sp{max_abs(e.R.tail(nphi)), flux.phi.q_tilde(e.flux_phi), 0.0, 0.0};
      res.verdict = check_convergence(su, sp, strict);
      return res.verdict.converged();
    };
    if (start_ok(it.eval)) {
      AssemblyResult updated = evaluate(it.u, it.phi, false, false, true);
      if (start_ok(updated)) {
        it.eval = std::move(updated);
        res.converged = true;
        return done(std::move(res));
      }
    }
  }

  BlockFactor base;
  BfgsInverse bfgs([&base](const Eigen::VectorXd& b) { return base.solve(b); });
  auto reform = [&](const AssemblyResult& e) {
    base.factor_u(e.K_uu);
    base.factor_phi(e.K_phiphi);
    bfgs.clear();
  };

  try {
    reform(it.eval);
    for (int k = 1; k <= cfg.max_iterations; ++k) {
      const Eigen::VectorXd dz = -bfgs.apply(it.eval.R);
      // The next tangent is needed for Newton, or when this update would
      // exhaust the quasi-Newton budget.
      const bool need_tangent = newton || bfgs.num_pairs() + 1 >= cfg.bfgs_max_updates;

      double step_len = 1.0;
      Iterate next{it.u, it.phi, {}};
      dofs.scatter_add(dz, next.u, next.phi);
      next.eval = evaluate(next.u, next.phi, need_tangent, need_tangent);
      if (cfg.line_search) {
        const double qu = flux.u.q_tilde(it.eval.flux_u);
        const double qp = flux.phi.q_tilde(it.eval.flux_phi);
        const double m0 = merit(it.eval, nu, qu, qp);
        double best = merit(next.eval, nu, qu, qp);
        if (!(best < m0)) {
          double s = 1.0;
          double best_s = 1.0;
          AssemblyResult best_eval;
          bool improved = false;
          for (int trial = 0; trial < cfg.line_search_trials; ++trial) {
            s *= cfg.line_search_factor;
            Eigen::VectorXd u = it.u;
            Eigen::VectorXd phi = it.phi;
            dofs.scatter_add(dz, u, phi, s);
            AssemblyResult e = evaluate(u, phi, false, false);
            const double m = merit(e, nu, qu, qp);
            if (m < best) {
              best = m;
              best_s = s;
              best_eval = std::move(e);
              improved = true;
              if (m < m0) break;
            }
          }
          if (improved) {
            step_len = best_s;
            next.u = it.u;
            next.phi = it.phi;
            dofs.scatter_add(dz, next.u, next.phi, step_len);
            next.eval = need_tangent ? evaluate(next.u, next.phi, true, true) : std::move(best_eval);
          }
        }
      }

      const Eigen::VectorXd s_vec = step_len * dz;
      const Eigen::VectorXd y_vec = next.eval.R - it.eval.R;
      it = std::move(next);
      res.iterations = k;
      res.verdict = stats(it.eval, s_vec);
      if (res.verdict.converged()) {
        res.converged = true;
        break;
      }
      if (newton) {
        reform(it.eval);
      } else if (!bfgs.add_pair(s_vec, y_vec)) {
        ++res.skipped_pairs;
        if (need_tangent) reform(it.eval);
      } else if (need_tangent) {
        reform(it.eval);
      }
    }
    if (!res.converged) res.message = "no convergence within " + std::to_string(cfg.max_iterations) + " iterations";
  } catch (const SolverError& e) {
    res.converged = false;
    res.message = e.what();
  }
  return done(std::move(res));
}

IncrementResult solve_increment_staggered(const Problem& p, const SolutionState& converged,
                                          const StepContext& step, const SolverConfig& cfg,
                                          const FluxHistory& flux) {
  const DofMap& dofs = p.dofs();
  const int nu = dofs.num_u();
  const int nphi = dofs.num_phi();
  const std::vector<double> H_prev = history_of(converged);
  Evaluator evaluate(p, step, H_prev);

  IncrementResult res;
  Iterate it{converged.u, converged.phi, {}};
  dofs.apply_constraints(step.displacement_factor, it.u, it.phi);

  // Newton loop on one block with the other field frozen.
  auto sub_solve = [&](bool u_block, std::span<const double> H, bool& ok) {
    const int off = u_block ? 0 : nu;
    const int n = u_block ? nu : nphi;
    const FluxTracker& tracker = u_block ? flux.u : flux.phi;
    const Eigen::VectorXd start = u_block ? it.u : it.phi;
    auto eval = [&](bool tangent) {
      return evaluate(it.u, it.phi, u_block && tangent, !u_block && tangent, false, H);
    };
    auto field_flux = [&](const AssemblyResult& e) { return u_block ? e.flux_u : e.flux_phi; };
    auto current = [&]() -> const Eigen::VectorXd& { return u_block ? it.u : it.phi; };

    AssemblyResult e = eval(true);
    ConvergenceCriteria strict = cfg.criteria;
    strict.Rn = cfg.criteria.linear_Rn;
    FieldVerdict v = check_field({max_abs(e.R.segment(off, n)), tracker.q_tilde(field_flux(e)), 0, 0},
                                 strict);
    ok = v.converged();
    SpdFactor factor;
    for (int k = 1; !ok && k <= cfg.max_iterations; ++k) {
      factor.factor(u_block ? e.K_uu : e.K_phiphi);
      const Eigen::VectorXd d = -factor.solve(e.R.segment(off, n));
      Eigen::VectorXd dz = Eigen::VectorXd::Zero(nu + nphi);
      dz.segment(off, n) = d;
      dofs.scatter_add(dz, it.u, it.phi);
      e = eval(true);
      ++res.iterations;
      v = check_field({max_abs(e.R.segment(off, n)), tracker.q_tilde(field_flux(e)), max_abs(d),
                       max_change(current(), start)},
                      cfg.criteria);
      ok = v.converged();
    }
    (u_block ? res.verdict.u : res.verdict.phi) = v;
    return e;
  };

  try {
    bool ok_u = false;
    bool ok_phi = false;
    AssemblyResult eu = sub_solve(true, H_prev, ok_u);
    if (!ok_u) {
      res.message = "displacement sub-problem did not converge";
      it.eval = std::move(eu);
      return finish(std::move(res), converged, std::move(it), H_prev);
    }
    // H from the equilibrated displacement, then held fixed for phi.
    std::vector<double> H = evaluate(it.u, it.phi, false, false, true).H;
    AssemblyResult ephi = sub_solve(false, H, ok_phi);
    res.converged = ok_phi;
    if (!ok_phi) res.message = "phase sub-problem did not converge";
    res.flux_u = eu.flux_u;
    res.flux_phi = ephi.flux_phi;
    // Reactions belong to the displacement equilibrium of the first pass.
    it.eval = std::move(eu);
    return finish(std::move(res), converged, std::move(it), H);
  } catch (const SolverError& e) {
    res.converged = false;
    res.message = e.what();
    return finish(std::move(res), converged, std::move(it), H_prev);
  }
}

IncrementResult solve_increment(const Problem& p, const SolutionState& converged,
                                const StepContext& step, const SolverConfig& cfg,
                                const FluxHistory& flux) {
  if (cfg.scheme == Scheme::Staggered) return solve_increment_staggered(p, converged, step, cfg, flux);
  return solve_increment_monolithic(p, converged, step, cfg, flux);
}

IncrementController::IncrementController(double dt_reference, const AdaptiveConfig& adaptive)
    : dt_ref_(dt_reference), dt_(dt_reference), adaptive_(adaptive) {
  if (!(dt_reference > 0.0)) throw std::invalid_argument("reference increment must be positive");
}

void IncrementController::on_converged(int iterations) {
  cutbacks_ = 0;
  if (iterations <= growth_iterations) dt_ = std::min(dt_ * growth_factor, dt_ref_);
}

bool IncrementController::on_failure() {
  if (cutbacks_ >= max_cutbacks) return false;
  ++cutbacks_;
  dt_ *= cutback_factor;
  return true;
}

void IncrementController::trigger_reduction(double attempted_dt) {
  triggered_ = true;
  dt_ = adaptive_.reduction * attempted_dt;
}

StepDecision adaptive_step_check(std::span<const double> phi_prev, std::span<const double> phi_new,
                                 IncrementController& controller, double attempted_dt) {
  if (!controller.adaptive_enabled() || controller.already_triggered()) return StepDecision::Accept;
  if (phi_prev.size() != phi_new.size()) throw std::invalid_argument("phase field size mismatch");
  const auto& a = controller.adaptive();
  for (std::size_t i = 0; i < phi_prev.size(); ++i) {
    if (phi_prev[i] < a.phi_trigger && phi_new[i] - phi_prev[i] >= a.dphi_trigger) {
      controller.trigger_reduction(attempted_dt);
      return StepDecision::Restart;
    }
  }
  return StepDecision::Accept;
}

}  // namespace phasefrac
