#include "doctest.h"

#include "phasefrac/assembly.hpp"
#include "phasefrac/dof_map.hpp"
#include "phasefrac/linear_solver.hpp"
#include "phasefrac/model.hpp"
#include "phasefrac/solvers.hpp"
#include "support/oracles.hpp"

#include <cstdlib>
#include <random>

using namespace phasefrac;

namespace {

Mesh single_element() {
  Mesh m;
  m.nodes = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  m.connectivity = {0, 1, 2, 3};
  m.node_sets = {{"bottom", {0, 1}}, {"top", {2, 3}}, {"left", {0, 3}}, {"right", {1, 2}},
                 {"all", {0, 1, 2, 3}}};
  m.validate();
  return m;
}

Eigen::VectorXd random_vec(int n, double scale, std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1, 1);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * d(rng);
  return v;
}

}  // namespace

TEST_SUITE("system") {

TEST_CASE("dof numbering") {
  const Mesh m = generate_structured_quad_mesh(1.0, 1.0, 0.5, std::nullopt, 1);
  const DofMap free = build_dof_map(m, {});
  CHECK(free.num_free() == 27);
  CHECK(free.num_total() == 27);
  const DofMap fixed = build_dof_map(m, {make_dirichlet(m, Field::DisplacementX, "bottom", 0.0),
                                         make_dirichlet(m, Field::DisplacementY, "bottom", 0.0)});
  CHECK(fixed.num_free() == 21);
  CHECK(fixed.num_u() == 12);
  CHECK(fixed.num_phi() == 9);
  // displacement equations first
  for (int n = 0; n < m.num_nodes(); ++n) {
    for (int c = 0; c < 2; ++c) CHECK(fixed.u_eq(n, c) < fixed.num_u());
    CHECK(fixed.phi_eq(n) >= fixed.num_u());
  }

  Eigen::VectorXd u = Eigen::VectorXd::Zero(18), phi = Eigen::VectorXd::Zero(9);
  const DofMap ramp = build_dof_map(m, {make_dirichlet(m, Field::DisplacementY, "top", 2.0, true),
                                        make_dirichlet(m, Field::DisplacementX, "top", 3.0)});
  ramp.apply_constraints(0.25, u, phi);
  for (int n : m.node_set("top")) {
    CHECK(u(2 * n + 1) == 0.5);
    CHECK(u(2 * n) == 3.0);
  }
  Eigen::VectorXd z = ramp.gather(u, phi);
  CHECK(z.size() == ramp.num_free());
  z.setOnes();
  ramp.scatter_add(z, u, phi, 2.0);
  for (int n : m.node_set("top")) CHECK(u(2 * n + 1) == 0.5);
  CHECK(phi.minCoeff() == 2.0);
}

TEST_CASE("zero state has zero residual") {
  const Mesh m = generate_structured_quad_mesh(1.0, 1.0, 0.25, std::nullopt, 1);
  Problem p(m, MaterialParams{}, Split::Spectral, {make_dirichlet(m, Field::DisplacementY, "bottom", 0.0)});
  const SolutionState s = p.initial_state();
  std::vector<double> H(p.assembler().num_ips(), 0.0);
  const auto r = p.assembler().assemble(s.u, s.phi, H, {});
  CHECK(r.R.norm() == 0.0);
  CHECK(r.internal_u.norm() == 0.0);
}

TEST_CASE("single element reaction against the dense oracle") {
  const Mesh m = single_element();
  const MaterialParams mat;
  const double eps = 1e-4;
  Problem p(m, mat, Split::Isotropic,
            {make_dirichlet(m, Field::DisplacementX, "all", 0.0), make_dirichlet(m, Field::DisplacementY, "bottom", 0.0),
             make_dirichlet(m, Field::DisplacementY, "top", eps, true)});
  SolutionState s = p.initial_state();
  p.dofs().apply_constraints(1.0, s.u, s.phi);
  std::vector<double> H(4, 0.0);
  AssemblyOptions opts;
  opts.update_history = false;
  const auto r = p.assembler().assemble(s.u, s.phi, H, opts);

  std::array<std::array<double, 2>, 4> xy{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  const Eigen::Matrix<double, 8, 8> K = oracle::q4_stiffness(xy, oracle::stiffness(mat.E, mat.nu)) * (1 + mat.k);
  const Eigen::Matrix<double, 8, 1> f = K * s.u;
  CHECK(oracle::rel_error(r.internal_u, f) < 1e-13);
  const double top = reaction(r.internal_u, m.node_set("top"), 1);
  CHECK(top == doctest::Approx((mat.lambda() + 2 * mat.mu()) * eps * (1 + mat.k)).epsilon(1e-12));
}

TEST_CASE("patch test on a distorted mesh") {
  Mesh m = generate_structured_quad_mesh(1.0, 1.0, 0.5, std::nullopt, 1);
  int centre = -1;
  for (int i = 0; i < m.num_nodes(); ++i)
    if (std::abs(m.nodes[i].x - 0.5) < 1e-12 && std::abs(m.nodes[i].y - 0.5) < 1e-12) centre = i;
  REQUIRE(centre >= 0);
  m.nodes[centre] = {0.57, 0.41};
  m.validate();
  const DofMap dofs = build_dof_map(m, {});
  Assembler a(m, dofs, MaterialParams{}, Split::Isotropic);
  Eigen::VectorXd u(2 * m.num_nodes());
  for (int i = 0; i < m.num_nodes(); ++i) {
    u(2 * i) = 1e-3 * m.nodes[i].x - 2e-3 * m.nodes[i].y + 0.1;
    u(2 * i + 1) = 4e-4 * m.nodes[i].x + 3e-3 * m.nodes[i].y;
  }
  const Eigen::VectorXd phi = Eigen::VectorXd::Zero(m.num_nodes());
  std::vector<double> H(a.num_ips(), 0.0);
  const auto r = a.assemble(u, phi, H, {});
  const double scale = r.internal_u.cwiseAbs().maxCoeff();
  CHECK(std::abs(r.internal_u(2 * centre)) < 1e-12 * scale);
  CHECK(std::abs(r.internal_u(2 * centre + 1)) < 1e-12 * scale);
  // boundary forces balance
  double fx = 0, fy = 0;
  for (int i = 0; i < m.num_nodes(); ++i) {
    fx += r.internal_u(2 * i);
    fy += r.internal_u(2 * i + 1);
  }
  CHECK(std::abs(fx) < 1e-12 * scale);
  CHECK(std::abs(fy) < 1e-12 * scale);
}

TEST_CASE("global tangent blocks match finite differences") {
  for (int order : {1, 2}) {
    CAPTURE(order);
    const Mesh m = generate_structured_quad_mesh(1.0, 1.0, 0.5, std::nullopt, order);
    Problem p(m, MaterialParams{}, Split::VolumetricDeviatoric,
              {make_dirichlet(m, Field::DisplacementX, "bottom", 0.0),
               make_dirichlet(m, Field::DisplacementY, "bottom", 0.0)});
    std::mt19937 rng(11);
    SolutionState s = p.initial_state();
    s.u = random_vec(2 * m.num_nodes(), 1e-3, rng);
    s.phi = random_vec(m.num_nodes(), 0.2, rng).array() + 0.4;
    p.dofs().apply_constraints(0.0, s.u, s.phi);
    std::vector<double> H(p.assembler().num_ips());
    for (double& h : H) h = 3 + std::abs(random_vec(1, 2, rng)(0));

    AssemblyOptions opts;
    opts.update_history = false;
    opts.tangent_u = opts.tangent_phi = true;
    const auto base = p.assembler().assemble(s.u, s.phi, H, opts);
    const int nu = p.dofs().num_u();
    const Eigen::VectorXd z0 = p.dofs().gather(s.u, s.phi);
    auto R = [&](const Eigen::VectorXd& z) {
      Eigen::VectorXd u = s.u, phi = s.phi;
      p.dofs().scatter_add(z - z0, u, phi);
      AssemblyOptions o;
      o.update_history = false;
      return p.assembler().assemble(u, phi, H, o).R;
    };
    const Eigen::MatrixXd J = oracle::fd_jacobian(R, z0, 1e-7);
    const Eigen::MatrixXd Kuu(base.K_uu), Kpp(base.K_phiphi);
    CHECK(oracle::rel_error(J.topLeftCorner(nu, nu), Kuu) < 1e-6);
    CHECK(oracle::rel_error(J.bottomRightCorner(J.rows() - nu, J.rows() - nu), Kpp) < 1e-6);
    // the coupling the tangent leaves out is real
    CHECK(J.topRightCorner(nu, J.rows() - nu).cwiseAbs().maxCoeff() > 0.0);

    const SparseSystem sys = assemble(p.assembler(), s, opts);
    const Eigen::MatrixXd Kd(sys.K);
    CHECK(Kd.topRightCorner(nu, Kd.rows() - nu).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("assembly does not depend on the thread count") {
  const Mesh m = generate_structured_quad_mesh(1.0, 1.0, 0.05, std::nullopt, 1);
  const DofMap dofs = build_dof_map(m, {make_dirichlet(m, Field::DisplacementY, "bottom", 0.0)});
  std::mt19937 rng(5);
  const Eigen::VectorXd u = random_vec(2 * m.num_nodes(), 1e-3, rng);
  const Eigen::VectorXd phi = random_vec(m.num_nodes(), 0.3, rng).array() + 0.3;
  AssemblyOptions opts;
  opts.tangent_u = opts.tangent_phi = true;
  setenv("PHASEFRAC_THREADS", "1", 1);
  Assembler serial(m, dofs, MaterialParams{}, Split::Spectral);
  setenv("PHASEFRAC_THREADS", "4", 1);
  Assembler threaded(m, dofs, MaterialParams{}, Split::Spectral);
  unsetenv("PHASEFRAC_THREADS");
  std::vector<double> H(serial.num_ips(), 0.0);
  const auto a = serial.assemble(u, phi, H, opts);
  const auto b = threaded.assemble(u, phi, H, opts);
  CHECK((a.R - b.R).cwiseAbs().maxCoeff() == 0.0);
  CHECK(Eigen::MatrixXd(a.K_uu - b.K_uu).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.H == b.H);
}

TEST_CASE("linear solves") {
  SparseSystem eye;
  eye.K.resize(3, 3);
  eye.K.setIdentity();
  eye.R = Eigen::Vector3d(1, 0, 0);
  eye.num_u = 3;
  CHECK((solve_linear(eye) - Eigen::Vector3d(1, 0, 0)).norm() == 0.0);

  SparseSystem d;
  d.K.resize(2, 2);
  d.K.insert(0, 0) = 2;
  d.K.insert(1, 1) = 4;
  d.R = Eigen::Vector2d(2, 4);
  CHECK((solve_linear(d) - Eigen::Vector2d(1, 1)).norm() < 1e-15);

  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  const int n = 50;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (u(rng) < 0.1) A(i, j) = A(j, i) = u(rng) - 0.5;
  for (int i = 0; i < n; ++i) A(i, i) = A.row(i).cwiseAbs().sum() + 1.0;
  SparseSystem r;
  r.K = A.sparseView();
  r.R = oracle::random_vector(n, rng);
  const Eigen::VectorXd x = solve_linear(r);
  const Eigen::VectorXd ref = A.llt().solve(r.R);
  CHECK((x - ref).norm() < 1e-12 * ref.norm());

  SparseSystem bad;
  bad.K.resize(2, 2);
  bad.K.insert(0, 0) = 1;
  bad.K.insert(1, 1) = -1;
  bad.R = Eigen::Vector2d(1, 1);
  CHECK_THROWS_AS(solve_linear(bad), SolverError);
}

TEST_CASE("constraint elimination matches a penalised full system") {
  const Mesh m = single_element();
  const MaterialParams mat;
  const double eps = 1e-6;
  // tiny load keeps the phase field practically at zero
  Problem p(m, mat, Split::VolumetricDeviatoric,
            {make_dirichlet(m, Field::DisplacementX, "left", 0.0), make_dirichlet(m, Field::DisplacementY, "bottom", 0.0),
             make_dirichlet(m, Field::DisplacementX, "right", eps, true)});
  const SolutionState s0 = p.initial_state();
  StepContext step;
  step.displacement_factor = 1.0;
  SolverConfig cfg;
  const auto res = solve_increment(p, s0, step, cfg, {});
  REQUIRE(res.converged);

  std::array<std::array<double, 2>, 4> xy{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  const double g = std::pow(1 - res.state.phi.mean(), 2) + mat.k;
  Eigen::Matrix<double, 8, 8> K = oracle::q4_stiffness(xy, oracle::stiffness(mat.E, mat.nu)) * g;
  Eigen::Matrix<double, 8, 1> f = Eigen::Matrix<double, 8, 1>::Zero();
  const double penalty = 1e8 * K.diagonal().maxCoeff();
  auto fix = [&](int dof, double v) {
    K(dof, dof) += penalty;
    f(dof) += penalty * v;
  };
  fix(0, 0);  // node 0 x
  fix(6, 0);  // node 3 x
  fix(1, 0);  // node 0 y
  fix(3, 0);  // node 1 y
  fix(2, eps);
  fix(4, eps);
  const Eigen::Matrix<double, 8, 1> u = K.ldlt().solve(f);
  CHECK(oracle::rel_error(res.state.u, u) < 1e-6);
}

}  // TEST_SUITE
