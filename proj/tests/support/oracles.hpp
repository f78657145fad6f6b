#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's element or solver code.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

/// Plane-strain isotropic stiffness in Voigt form (engineering shear).
inline Eigen::Matrix3d stiffness(double E, double nu) {
  const double lam = E * nu / ((1 + nu) * (1 - 2 * nu));
  const double mu = E / (2 * (1 + nu));
  Eigen::Matrix3d C;
  C << lam + 2 * mu, lam, 0, lam, lam + 2 * mu, 0, 0, 0, mu;
  return C;
}

/// Bilinear quad stiffness, corners counter-clockwise, 2x2 Gauss, written
/// out by hand. Dof order (x0, y0, x1, y1, ...).
inline Eigen::Matrix<double, 8, 8> q4_stiffness(const std::array<std::array<double, 2>, 4>& xy,
                                                 const Eigen::Matrix3d& C, double t = 1.0) {
  const double g = 1.0 / std::sqrt(3.0);
  const double xi_n[4] = {-1, 1, 1, -1};
  const double eta_n[4] = {-1, -1, 1, 1};
  Eigen::Matrix<double, 8, 8> K = Eigen::Matrix<double, 8, 8>::Zero();
  for (double xi : {-g, g}) {
    for (double eta : {-g, g}) {
      double dxi[4], deta[4];
      for (int a = 0; a < 4; ++a) {
        dxi[a] = 0.25 * xi_n[a] * (1 + eta * eta_n[a]);
        deta[a] = 0.25 * eta_n[a] * (1 + xi * xi_n[a]);
      }
      double J00 = 0, J01 = 0, J10 = 0, J11 = 0;
      for (int a = 0; a < 4; ++a) {
        J00 += dxi[a] * xy[a][0];
        J01 += dxi[a] * xy[a][1];
        J10 += deta[a] * xy[a][0];
        J11 += deta[a] * xy[a][1];
      }
      const double det = J00 * J11 - J01 * J10;
      Eigen::Matrix<double, 3, 8> B = Eigen::Matrix<double, 3, 8>::Zero();
      for (int a = 0; a < 4; ++a) {
        const double dx = (J11 * dxi[a] - J01 * deta[a]) / det;
        const double dy = (-J10 * dxi[a] + J00 * deta[a]) / det;
        B(0, 2 * a) = dx;
        B(1, 2 * a + 1) = dy;
        B(2, 2 * a) = dy;
        B(2, 2 * a + 1) = dx;
      }
      K += B.transpose() * C * B * det * t;
    }
  }
  return K;
}

/// Direct BFGS update of a stiffness approximation:
/// K - K s s^T K / (s^T K s) + y y^T / (y^T s).
inline Eigen::MatrixXd bfgs_direct(const Eigen::MatrixXd& K, const Eigen::VectorXd& s,
                                   const Eigen::VectorXd& y) {
  const Eigen::VectorXd Ks = K * s;
  return K - Ks * Ks.transpose() / s.dot(Ks) + y * y.transpose() / y.dot(s);
}

inline Eigen::MatrixXd random_spd(int n, std::mt19937& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = d(rng);
  return A.transpose() * A + n * Eigen::MatrixXd::Identity(n, n);
}

inline Eigen::VectorXd random_vector(int n, std::mt19937& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

/// Central difference Jacobian of f at x, columns by perturbation.
inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd J(f0.size(), x.size());
  for (int j = 0; j < x.size(); ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    J.col(j) = (f(xp) - f(xm)) / (2 * h);
  }
  return J;
}

inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (int j = 0; j < x.size(); ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    g(j) = (f(xp) - f(xm)) / (2 * h);
  }
  return g;
}

/// max |a - b| / max(max |b|, floor)
inline double rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double floor = 1e-300) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), floor);
}

/// Homogeneous phase field under a fixed driving energy H.
inline double homogeneous_phase(double H, double ell, double Gc) {
  return 2 * H * ell / (Gc + 2 * H * ell);
}

/// Rayleigh speed from the cubic in eta = (c_R / c_s)^2, bisection on (0, 1).
inline double rayleigh_speed(double E, double nu, double rho) {
  const double mu = E / (2 * (1 + nu));
  const double cs = std::sqrt(mu / rho);
  const double kappa = (1 - 2 * nu) / (2 * (1 - nu));  // (c_s / c_p)^2
  auto f = [&](double eta) {
    return std::pow(2 - eta, 2) - 4 * std::sqrt(1 - eta) * std::sqrt(1 - kappa * eta);
  };
  double lo = 1e-9, hi = 1 - 1e-15;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((f(lo) < 0) == (f(mid) < 0) ? lo : hi) = mid;
  }
  return std::sqrt(0.5 * (lo + hi)) * cs;
}

}  // namespace oracle
