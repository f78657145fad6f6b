#include "doctest.h"

#include "phasefrac/fem.hpp"
#include "support/oracles.hpp"

#include <cmath>
#include <random>

using namespace phasefrac;

namespace {

NodeCoords unit_square(int order) {
  const double xy[8][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0}, {1, 0.5}, {0.5, 1}, {0, 0.5}};
  NodeCoords c(order == 1 ? 4 : 8, 2);
  for (int a = 0; a < c.rows(); ++a) c.row(a) << xy[a][0], xy[a][1];
  return c;
}

NodeCoords skewed_quad() {
  NodeCoords c(4, 2);
  c << 0.1, 0.0, 1.2, 0.15, 1.0, 0.9, -0.05, 1.1;
  return c;
}

ElemVec displacement_of(const NodeCoords& c, double exx, double eyy, double gxy) {
  ElemVec u(2 * c.rows());
  for (int a = 0; a < c.rows(); ++a) {
    u(2 * a) = exx * c(a, 0) + gxy * c(a, 1);
    u(2 * a + 1) = eyy * c(a, 1);
  }
  return u;
}

}  // namespace

TEST_SUITE("fem") {

TEST_CASE("shape functions") {
  auto s = shape_eval(1, 0.0, 0.0);
  for (int a = 0; a < 4; ++a) CHECK(s.N(a) == doctest::Approx(0.25));
  s = shape_eval(1, -1.0, -1.0);
  CHECK(s.N(0) == 1.0);
  for (int a = 1; a < 4; ++a) CHECK(s.N(a) == 0.0);

  const auto q = shape_eval(2, 0.3, -0.4);
  CHECK(std::abs(q.N.sum() - 1.0) < 1e-15);
  CHECK(std::abs(q.dN.col(0).sum()) < 1e-14);
  CHECK(std::abs(q.dN.col(1).sum()) < 1e-14);

  // serendipity formulas evaluated independently
  const double xi = 0.3, eta = -0.4;
  const double c0 = 0.25 * (1 - xi) * (1 - eta) * (-xi - eta - 1);
  const double m0 = 0.5 * (1 - xi * xi) * (1 - eta);
  CHECK(q.N(0) == doctest::Approx(c0).epsilon(1e-14));
  CHECK(q.N(4) == doctest::Approx(m0).epsilon(1e-14));

  // derivatives against central differences
  const double h = 1e-6;
  for (int order : {1, 2}) {
    const auto s0 = shape_eval(order, xi, eta);
    const auto px = shape_eval(order, xi + h, eta), mx = shape_eval(order, xi - h, eta);
    const auto py = shape_eval(order, xi, eta + h), my = shape_eval(order, xi, eta - h);
    for (int a = 0; a < s0.N.size(); ++a) {
      CHECK(s0.dN(a, 0) == doctest::Approx((px.N(a) - mx.N(a)) / (2 * h)).epsilon(1e-8));
      CHECK(s0.dN(a, 1) == doctest::Approx((py.N(a) - my.N(a)) / (2 * h)).epsilon(1e-8));
    }
  }
}

TEST_CASE("quadrature integrates the element area") {
  for (int order : {1, 2}) {
    double w = 0;
    for (const auto& qp : gauss_rule(order)) w += qp.weight;
    CHECK(w == doctest::Approx(4.0));
    CHECK(gauss_rule(order).size() == (order == 1 ? 4u : 9u));
  }
}

TEST_CASE("kinematics") {
  const NodeCoords c = unit_square(1);
  ElemVec rigid(8);
  for (int a = 0; a < 4; ++a) {
    rigid(2 * a) = 0.3;
    rigid(2 * a + 1) = -1.7;
  }
  CHECK(kinematics(1, c, 0.2, 0.1, rigid).strain.norm() < 1e-15);

  const double e = 1e-3;
  auto k = kinematics(1, c, 0.5, -0.3, displacement_of(c, e, 0, 0));
  CHECK(k.strain(0) == doctest::Approx(e));
  CHECK(std::abs(k.strain(1)) < 1e-15);
  CHECK(std::abs(k.strain(2)) < 1e-15);
  k = kinematics(1, c, 0.5, -0.3, displacement_of(c, 0, 0, e));
  CHECK(std::abs(k.strain(0)) < 1e-15);
  CHECK(k.strain(2) == doctest::Approx(e));
  CHECK(k.detJ == doctest::Approx(0.25));

  NodeCoords inverted = c;
  inverted.row(1).swap(inverted.row(3));
  CHECK_THROWS_AS(kinematics(1, inverted, 0, 0, rigid), ElementError);
}

TEST_CASE("energy splits") {
  MaterialParams p;
  for (Split s : {Split::Isotropic, Split::VolumetricDeviatoric, Split::Spectral}) {
    const auto r = split_energy(Voigt::Zero(), p, s);
    CHECK(r.psi_plus == 0.0);
    CHECK(r.psi_minus == 0.0);
    CHECK(r.stress.norm() == 0.0);
  }

  const double a = 1e-3;
  const auto hyd = split_energy(Voigt(-a, -a, 0), p, Split::VolumetricDeviatoric);
  CHECK(hyd.psi_plus == doctest::Approx(0.0));
  CHECK(hyd.psi_minus == doctest::Approx(0.5 * p.bulk() * 4 * a * a));

  const Eigen::Matrix3d C = oracle::stiffness(p.E, p.nu);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(-2e-3, 2e-3);
  for (int i = 0; i < 20; ++i) {
    const Voigt eps = i == 0 ? Voigt(a, 0, 0) : Voigt(d(rng), d(rng), d(rng));
    const double psi = 0.5 * eps.dot(C * eps);
    for (Split s : {Split::Isotropic, Split::VolumetricDeviatoric, Split::Spectral}) {
      const auto r = split_energy(eps, p, s);
      CHECK(r.psi_plus + r.psi_minus == doctest::Approx(psi).epsilon(1e-12));
      CHECK(r.psi_plus >= 0.0);
      CHECK(r.psi_minus >= 0.0);
      CHECK((r.stress - C * eps).norm() <= 1e-12 * (C * eps).norm());
    }
    CHECK(split_energy(eps, p, Split::Isotropic).psi_plus == doctest::Approx(psi));
  }

  // spectral: pure compression stores nothing in the tensile part
  CHECK(split_energy(Voigt(-a, -2 * a, 0), p, Split::Spectral).psi_plus == doctest::Approx(0.0));
  CHECK(parse_split("vol-dev") == Split::VolumetricDeviatoric);
  CHECK_THROWS(parse_split("bogus"));
}

TEST_CASE("history update") {
  CHECK(update_history(5, 3) == 5);
  CHECK(update_history(0, 7) == 7);
  double H = 0;
  for (double psi : {1.0, 4.0, 0.5, 4.0}) H = update_history(H, psi);
  CHECK(H == 4.0);
}

TEST_CASE("element residual special states") {
  MaterialParams p;
  ElementInput in;
  in.coords = unit_square(1);
  in.u = ElemVec::Zero(8);
  in.phi = ElemVec::Zero(4);
  const std::vector<double> H0(4, 0.0);
  in.H = H0;
  auto c = element_residual_and_tangent(in, p);
  CHECK(c.r_u.norm() == 0.0);
  CHECK(c.r_phi.norm() == 0.0);

  // homogeneous phase field balances a uniform driving energy
  const std::vector<double> H(4, 12.5);
  in.H = H;
  const double phi_star = oracle::homogeneous_phase(12.5, p.ell, p.Gc);
  in.phi = ElemVec::Constant(4, phi_star);
  c = element_residual_and_tangent(in, p);
  CHECK(c.r_phi.cwiseAbs().maxCoeff() < 1e-12 * c.flux_phi.maxCoeff());
  in.phi = ElemVec::Constant(4, phi_star + 0.01);
  c = element_residual_and_tangent(in, p);
  CHECK(c.r_phi.cwiseAbs().minCoeff() > 1e-6);
}

TEST_CASE("consistent mass sums to the element mass") {
  for (int order : {1, 2}) {
    const ElemMat M = element_mass(order, unit_square(order), 1.0, 1.0);
    const int n = order == 1 ? 4 : 8;
    double mx = 0, my = 0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        mx += M(2 * a, 2 * b);
        my += M(2 * a + 1, 2 * b + 1);
        CHECK(M(2 * a, 2 * b + 1) == 0.0);
      }
    CHECK(mx == doctest::Approx(1.0));
    CHECK(my == doctest::Approx(1.0));
  }
  CHECK(element_mass(1, unit_square(1), 2.5, 0.5).sum() == doctest::Approx(2 * 2.5 * 0.5));
}

TEST_CASE("undamaged stiffness matches the hand-written oracle") {
  MaterialParams p;
  ElementInput in;
  in.coords = skewed_quad();
  in.u = ElemVec::Zero(8);
  in.phi = ElemVec::Zero(4);
  const std::vector<double> H(4, 0.0);
  in.H = H;
  const auto c = element_residual_and_tangent(in, p);
  std::array<std::array<double, 2>, 4> xy;
  for (int a = 0; a < 4; ++a) xy[a] = {in.coords(a, 0), in.coords(a, 1)};
  const Eigen::MatrixXd K0 = oracle::q4_stiffness(xy, oracle::stiffness(p.E, p.nu)) * (1 + p.k);
  CHECK(oracle::rel_error(c.K_uu, K0) < 1e-12);
}

TEST_CASE("element tangents match finite differences") {
  MaterialParams p;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int order : {1, 2}) {
    {
      CAPTURE(order);
      ElementInput in;
      in.order = order;
      in.coords = order == 1 ? skewed_quad() : unit_square(2);
      const int n = in.coords.rows();
      in.u = ElemVec(2 * n);
      in.phi = ElemVec(n);
      for (int i = 0; i < 2 * n; ++i) in.u(i) = 1e-3 * d(rng);
      for (int i = 0; i < n; ++i) in.phi(i) = 0.3 + 0.2 * d(rng);
      std::vector<double> H(9);
      for (double& h : H) h = 5 + 2 * d(rng);
      in.H = H;
      const auto c = element_residual_and_tangent(in, p);

      auto ru = [&](const Eigen::VectorXd& u) {
        ElementInput q = in;
        q.u = u;
        return Eigen::VectorXd(element_residual_and_tangent(q, p).r_u);
      };
      auto rphi = [&](const Eigen::VectorXd& phi) {
        ElementInput q = in;
        q.phi = phi;
        return Eigen::VectorXd(element_residual_and_tangent(q, p).r_phi);
      };
      CHECK(oracle::rel_error(oracle::fd_jacobian(ru, in.u, 1e-7), c.K_uu) < 1e-6);
      CHECK(oracle::rel_error(oracle::fd_jacobian(rphi, in.phi, 1e-6), c.K_phiphi) < 1e-6);
      CHECK(oracle::rel_error(c.K_uu, c.K_uu.transpose()) < 1e-14);
      CHECK(oracle::rel_error(c.K_phiphi, c.K_phiphi.transpose()) < 1e-14);
    }
  }
}

TEST_CASE("residuals are gradients of the discrete energy") {
  MaterialParams p;
  ElementInput in;
  in.coords = skewed_quad();
  in.u = ElemVec(8);
  in.phi = ElemVec(4);
  in.u << 1e-3, 0, 2e-3, -1e-3, 0, 1e-3, -1e-3, 2e-3;
  in.phi << 0.1, 0.4, 0.2, 0.3;
  const std::vector<double> zero(4, 0.0);

  // H = psi0(u) at the current displacement
  const auto ips = ip_energies(1, in.coords, in.u, p, Split::Isotropic);
  std::vector<double> H(4);
  for (int q = 0; q < 4; ++q) H[q] = ips[q].psi;
  in.H = H;
  const auto c = element_residual_and_tangent(in, p);

  auto energy_u = [&](const Eigen::VectorXd& u) {
    ElementInput q = in;
    q.u = u;
    q.H = zero;
    return element_strain_energy(q, p);
  };
  auto energy_phi = [&](const Eigen::VectorXd& phi) {
    ElementInput q = in;
    q.phi = phi;
    return element_strain_energy(q, p) + element_fracture_energy(q, p);
  };
  CHECK(oracle::rel_error(oracle::fd_gradient(energy_u, in.u, 1e-7), c.r_u) < 1e-6);
  CHECK(oracle::rel_error(oracle::fd_gradient(energy_phi, in.phi, 1e-6), c.r_phi) < 1e-6);
}

TEST_CASE("material validation") {
  MaterialParams p;
  CHECK_NOTHROW(p.validate());
  p.nu = 0.5;
  CHECK_THROWS(p.validate());
  p = {};
  p.ell = 0;
  CHECK_THROWS(p.validate());
}

}  // TEST_SUITE
