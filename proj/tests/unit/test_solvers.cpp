#include "doctest.h"

#include "phasefrac/bench.hpp"
#include "phasefrac/load_program.hpp"
#include "phasefrac/solvers.hpp"
#include "support/cases.hpp"

#include <vector>

using namespace phasefrac;

namespace {

IncrementResult small_increment(Scheme scheme, double factor) {
  RunSpec s = testcase::small_sent();
  const auto p = build_problem(s);
  StepContext step;
  step.displacement_factor = factor;
  SolverConfig cfg = s.solver;
  cfg.scheme = scheme;
  return solve_increment(*p, p->initial_state(), step, cfg, {});
}

}  // namespace

TEST_SUITE("solvers") {

TEST_CASE("elastic increment converges immediately") {
  for (Scheme scheme : {Scheme::MonolithicBfgs, Scheme::MonolithicNewton}) {
    CAPTURE(to_string(scheme));
    const auto r = small_increment(scheme, 1e-3);
    CHECK(r.converged);
    // phi only starts moving once H has been seeded by the first u update
    CHECK(r.iterations <= 3);
    CHECK(r.state.phi.maxCoeff() < 1e-3);
  }
  const auto st = small_increment(Scheme::Staggered, 1e-3);
  CHECK(st.converged);
  CHECK(st.iterations == 2);
}

TEST_CASE("unloaded increment needs no iterations") {
  const auto r = small_increment(Scheme::MonolithicBfgs, 0.0);
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  CHECK(r.state.u.norm() == 0.0);
}

TEST_CASE("fully prescribed displacement still drives the phase field") {
  Mesh m;
  m.nodes = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  m.connectivity = {0, 1, 2, 3};
  m.node_sets = {{"left", {0, 3}}, {"right", {1, 2}}, {"all", {0, 1, 2, 3}}};
  m.validate();
  MaterialParams mp;
  mp.ell = 0.1;
  Problem p(m, mp, Split::Isotropic,
            {make_dirichlet(m, Field::DisplacementX, "left", 0.0),
             make_dirichlet(m, Field::DisplacementX, "right", 0.01, true),
             make_dirichlet(m, Field::DisplacementY, "all", 0.0)});
  StepContext step;
  step.displacement_factor = 1.0;
  for (Scheme scheme : {Scheme::MonolithicBfgs, Scheme::MonolithicNewton, Scheme::Staggered}) {
    CAPTURE(to_string(scheme));
    SolverConfig cfg;
    cfg.scheme = scheme;
    const auto r = solve_increment(p, p.initial_state(), step, cfg, {});
    REQUIRE(r.converged);
    CHECK(r.iterations > 0);
    CHECK(r.state.phi.minCoeff() > 0.5);
    for (const auto& ip : r.state.ip) CHECK(ip.H > 0.0);
  }
}

TEST_CASE("scheme names") {
  for (Scheme s : {Scheme::MonolithicBfgs, Scheme::MonolithicNewton, Scheme::Staggered})
    CHECK(parse_scheme(to_string(s)) == s);
  CHECK_THROWS(parse_scheme("gauss-seidel"));
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.max_iterations = 0;
  CHECK_THROWS(c.validate());
}

TEST_CASE("adaptive step check") {
  IncrementController c(0.1, AdaptiveConfig{true});
  std::vector<double> prev{0.0, 0.5}, next{0.1, 1.0};
  CHECK(adaptive_step_check(prev, next, c, 0.1) == StepDecision::Restart);
  CHECK(c.dt() == doctest::Approx(0.01));
  CHECK(c.already_triggered());
  // fires only once
  CHECK(adaptive_step_check(prev, next, c, 0.01) == StepDecision::Accept);

  IncrementController d(0.1, AdaptiveConfig{true});
  std::vector<double> damaged{0.8}, broken{1.0};
  CHECK(adaptive_step_check(damaged, broken, d, 0.1) == StepDecision::Accept);
  std::vector<double> a{0.3}, b{0.79};
  CHECK(adaptive_step_check(a, b, d, 0.1) == StepDecision::Accept);
  std::vector<double> e{0.3}, f{0.8};
  CHECK(adaptive_step_check(e, f, d, 0.05) == StepDecision::Restart);
  CHECK(d.dt() == doctest::Approx(0.005));

  IncrementController off(0.1);
  CHECK(adaptive_step_check(prev, next, off, 0.1) == StepDecision::Accept);
}

TEST_CASE("increment controller") {
  IncrementController c(0.1);
  c.on_converged(3);
  CHECK(c.dt() == doctest::Approx(0.1));  // capped
  for (int i = 0; i < 5; ++i) CHECK(c.on_failure());
  CHECK(c.dt() == doctest::Approx(0.1 / 32));
  CHECK_FALSE(c.on_failure());
  c.on_converged(6);
  CHECK(c.dt() == doctest::Approx(0.1 / 32));
  c.on_converged(5);
  CHECK(c.dt() == doctest::Approx(1.5 * 0.1 / 32));
  CHECK(c.cutbacks() == 0);
  CHECK_THROWS(IncrementController(0.0));
}

TEST_CASE("zero amplitude program gives zero reactions") {
  RunSpec s = testcase::small_sent();
  s.u_max = 0.0;
  const auto p = build_problem(s);
  const auto r = run_load_program(*p, build_ramp(s), build_options(s), p->initial_state());
  CHECK(r.completed);
  for (const auto& rec : r.log.records) CHECK(rec.reaction_N == 0.0);
}

TEST_CASE("ramp through failure") {
  for (Scheme scheme : {Scheme::MonolithicBfgs, Scheme::Staggered}) {
    CAPTURE(to_string(scheme));
    RunSpec s = testcase::small_sent();
    s.solver.scheme = scheme;
    if (scheme == Scheme::Staggered) {
      // one pass per increment lags the load, so it needs much finer steps
      s.increments = 400;
      s.adaptive = false;
    }
    const CaseResult r = run_case(s, false);
    CHECK(r.run.completed);
    CHECK(r.history_violations == 0);
    const auto& recs = r.run.log.records;
    REQUIRE(!recs.empty());
    for (std::size_t i = 1; i < recs.size(); ++i) {
      CHECK(recs[i].cum_iterations >= recs[i - 1].cum_iterations);
      CHECK(recs[i].time > recs[i - 1].time);
    }
    CHECK(recs.back().time == doctest::Approx(1.0));
    CHECK(recs.back().crack_length_mm == doctest::Approx(0.5));
    CHECK(recs.back().reaction_N < 0.1 * r.run.log.peak_reaction());
  }
}

TEST_CASE("adaptive restart is recorded") {
  const CaseResult r = run_case(testcase::small_sent(), false);
  CHECK(r.run.adaptive_restarts == 1);
  CHECK(r.run.dt_after_restart == doctest::Approx(0.1 * r.run.dt_before_restart));
}

TEST_CASE("identical runs are identical") {
  RunSpec s = testcase::small_sent();
  const CaseResult a = run_case(s, false);
  const CaseResult b = run_case(s, false);
  CHECK(a.run.log == b.run.log);
}

TEST_CASE("persistent failure aborts after the cutbacks") {
  RunSpec s = testcase::small_sent();
  s.increments = 1;
  s.adaptive = false;
  s.solver.max_iterations = 1;
  s.solver.line_search = false;
  const CaseResult r = run_case(s, false);
  CHECK_FALSE(r.run.completed);
  CHECK_FALSE(r.run.abort_reason.empty());
  CHECK(r.run.failed_attempts >= 6);
}

}  // TEST_SUITE
