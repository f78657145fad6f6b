#include "phasefrac/fem.hpp"

#include <cmath>
#include <limits>

namespace phasefrac {

void MaterialParams::validate() const {
  std::string bad;
  if (!(E > 0.0)) bad += " E>0";
  if (!(nu >= 0.0 && nu < 0.5)) bad += " 0<=nu<0.5";
  if (!(Gc > 0.0)) bad += " Gc>0";
  if (!(ell > 0.0)) bad += " ell>0";
  if (!(rho >= 0.0)) bad += " rho>=0";
  if (!(k > 0.0 && k < 1e-2)) bad += " 0<k<<1";
  if (!bad.empty()) throw std::invalid_argument("material parameters violate:" + bad);
}

Split parse_split(const std::string& name) {
  if (name == "isotropic") return Split::Isotropic;
  if (name == "vol-dev" || name == "volumetric-deviatoric") return Split::VolumetricDeviatoric;
  if (name == "spectral") return Split::Spectral;
  throw std::invalid_argument("unknown energy split '" + name + "'");
}

std::string to_string(Split split) {
  switch (split) {
    case Split::Isotropic: return "isotropic";
    case Split::VolumetricDeviatoric: return "vol-dev";
    case Split::Spectral: return "spectral";
  }
  return "?";
}

Eigen::Matrix3d plane_strain_stiffness(const MaterialParams& params) {
  const double lam = params.lambda();
  const double mu = params.mu();
  Eigen::Matrix3d C;
  C << lam + 2.0 * mu, lam, 0.0,
       lam, lam + 2.0 * mu, 0.0,
       0.0, 0.0, mu;
  return C;
}

SplitResult split_energy(const Voigt& eps, const MaterialParams& params, Split split) {
  const double lam = params.lambda();
  const double mu = params.mu();
  const double exy = 0.5 * eps(2);
  const double tr = eps(0) + eps(1);
  const double eps_eps = eps(0) * eps(0) + eps(1) * eps(1) + 2.0 * exy * exy;

  SplitResult out;
  out.stress << lam * tr + 2.0 * mu * eps(0), lam * tr + 2.0 * mu * eps(1), mu * eps(2);
  out.psi = 0.5 * lam * tr * tr + mu * eps_eps;

  auto pos = [](double a) { return a > 0.0 ? a : 0.0; };
  auto neg = [](double a) { return a < 0.0 ? a : 0.0; };

  switch (split) {
    case Split::Isotropic:
      out.psi_plus = out.psi;
      out.psi_minus = 0.0;
      break;
    case Split::VolumetricDeviatoric: {
      // In-plane deviator, consistent with K_n for n = 2.
      const double half_tr = 0.5 * tr;
      const double dxx = eps(0) - half_tr;
      const double dyy = eps(1) - half_tr;
      const double dev2 = dxx * dxx + dyy * dyy + 2.0 * exy * exy;
      const double K = params.bulk();
      out.psi_minus = 0.5 * K * neg(tr) * neg(tr);
      out.psi_plus = 0.5 * K * pos(tr) * pos(tr) + mu * dev2;
      break;
    }
    case Split::Spectral: {
      const double mean = 0.5 * tr;
      const double rad = std::hypot(0.5 * (eps(0) - eps(1)), exy);
      const double e1 = mean + rad;
      const double e2 = mean - rad;
      out.psi_plus = 0.5 * lam * pos(tr) * pos(tr) + mu * (pos(e1) * pos(e1) + pos(e2) * pos(e2));
      out.psi_minus = 0.5 * lam * neg(tr) * neg(tr) + mu * (neg(e1) * neg(e1) + neg(e2) * neg(e2));
      break;
    }
  }
  return out;
}

double update_history(double H_prev, double psi_plus) {
  if (H_prev < 0.0 || psi_plus < 0.0)
    throw std::invalid_argument("history update needs non-negative energies");
  return H_prev > psi_plus ? H_prev : psi_plus;
}

ShapeValues shape_eval(int order, double xi, double eta) {
  static constexpr double cx[8] = {-1, 1, 1, -1, 0, 1, 0, -1};
  static constexpr double cy[8] = {-1, -1, 1, 1, -1, 0, 1, 0};
  ShapeValues sv;
  if (order == 1) {
    sv.N.resize(4);
    sv.dN.resize(4, 2);
    for (int a = 0; a < 4; ++a) {
      sv.N(a) = 0.25 * (1.0 + cx[a] * xi) * (1.0 + cy[a] * eta);
      sv.dN(a, 0) = 0.25 * cx[a] * (1.0 + cy[a] * eta);
      sv.dN(a, 1) = 0.25 * cy[a] * (1.0 + cx[a] * xi);
    }
    return sv;
  }
  sv.N.resize(8);
  sv.dN.resize(8, 2);
  for (int a = 0; a < 4; ++a) {
    const double px = 1.0 + cx[a] * xi;
    const double py = 1.0 + cy[a] * eta;
    const double s = cx[a] * xi + cy[a] * eta - 1.0;
    sv.N(a) = 0.25 * px * py * s;
    sv.dN(a, 0) = 0.25 * cx[a] * py * (s + px);
    sv.dN(a, 1) = 0.25 * cy[a] * px * (s + py);
  }
  for (int a = 4; a < 8; ++a) {
    if (cx[a] == 0.0) {
      sv.N(a) = 0.5 * (1.0 - xi * xi) * (1.0 + cy[a] * eta);
      sv.dN(a, 0) = -xi * (1.0 + cy[a] * eta);
      sv.dN(a, 1) = 0.5 * cy[a] * (1.0 - xi * xi);
    } else {
      sv.N(a) = 0.5 * (1.0 + cx[a] * xi) * (1.0 - eta * eta);
      sv.dN(a, 0) = 0.5 * cx[a] * (1.0 - eta * eta);
      sv.dN(a, 1) = -eta * (1.0 + cx[a] * xi);
    }
  }
  return sv;
}

std::span<const QuadraturePoint> gauss_rule(int order) {
  static const double g2 = 1.0 / std::sqrt(3.0);
  static const QuadraturePoint two[4] = {
      {-g2, -g2, 1.0}, {g2, -g2, 1.0}, {g2, g2, 1.0}, {-g2, g2, 1.0}};
  static const double g3 = std::sqrt(0.6);
  static const double w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  static const double p[3] = {-g3, 0.0, g3};
  static const auto three = [] {
    std::array<QuadraturePoint, 9> pts{};
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) pts[3 * j + i] = {p[i], p[j], w[i] * w[j]};
    return pts;
  }();
  if (order == 1) return {two, 4};
  return {three.data(), three.size()};
}

Kinematics kinematics(int order, const NodeCoords& coords, double xi, double eta,
                      const ElemVec& u_e) {
  const ShapeValues sv = shape_eval(order, xi, eta);
  const int m = static_cast<int>(sv.N.size());
  const Eigen::Matrix2d J = sv.dN.transpose() * coords;  // rows d/dxi, d/deta
  Kinematics k;
  k.detJ = J.determinant();
  if (!(k.detJ > 0.0)) throw ElementError("distorted element: non-positive Jacobian");
  const Eigen::Matrix<double, 2, Eigen::Dynamic, 0, 2, 8> dNdx =
      J.inverse() * sv.dN.transpose();
  k.N = sv.N;
  k.Bphi = dNdx;
  k.Bu.setZero(3, 2 * m);
  for (int a = 0; a < m; ++a) {
    k.Bu(0, 2 * a) = dNdx(0, a);
    k.Bu(1, 2 * a + 1) = dNdx(1, a);
    k.Bu(2, 2 * a) = dNdx(1, a);
    k.Bu(2, 2 * a + 1) = dNdx(0, a);
  }
  k.strain = k.Bu * u_e;
  return k;
}

ElementContribution element_residual_and_tangent(const ElementInput& in,
                                                 const MaterialParams& params) {
  const int m = static_cast<int>(in.phi.size());
  const auto rule = gauss_rule(in.order);
  if (in.H.size() < rule.size()) throw ElementError("history values missing for element");
  const Eigen::Matrix3d C = plane_strain_stiffness(params);
  const bool inertia = in.acceleration.has_value();
  const bool want_mass = in.want_mass || inertia;

  ElementContribution out;
  out.r_u.setZero(2 * m);
  out.r_phi.setZero(m);
  ElemVec drive = ElemVec::Zero(m);
  if (in.want_tangent) {
    out.K_uu.setZero(2 * m, 2 * m);
    out.K_phiphi.setZero(m, m);
  }
  if (want_mass) out.M.setZero(2 * m, 2 * m);

  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto& qp = rule[q];
    const Kinematics kin = kinematics(in.order, in.coords, qp.xi, qp.eta, in.u);
    const double dV = kin.detJ * qp.weight * in.thickness;
    const double phi = kin.N.dot(in.phi);
    const Eigen::Vector2d grad = kin.Bphi * in.phi;
    const double g = degradation(phi) + params.k;
    const Voigt sigma0 = C * kin.strain;
    const double H = in.H[q];
    const double f = in.fatigue.empty() ? 1.0 : in.fatigue[q];
    const double gc = f * params.Gc;

    out.r_u.noalias() += (g * dV) * (kin.Bu.transpose() * sigma0);
    drive.noalias() += (2.0 * (1.0 - phi) * H * dV) * kin.N;
    out.r_phi.noalias() += dV * ((-2.0 * (1.0 - phi) * H + gc * phi / params.ell) * kin.N +
                                 gc * params.ell * (kin.Bphi.transpose() * grad));
    if (in.want_tangent) {
      out.K_uu.noalias() += (g * dV) * (kin.Bu.transpose() * C * kin.Bu);
      out.K_phiphi.noalias() += ((2.0 * H + gc / params.ell) * dV) * (kin.N * kin.N.transpose());
      out.K_phiphi.noalias() += (gc * params.ell * dV) * (kin.Bphi.transpose() * kin.Bphi);
    }
    if (want_mass) {
      const double rdv = params.rho * dV;
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          const double v = rdv * kin.N(a) * kin.N(b);
          out.M(2 * a, 2 * b) += v;
          out.M(2 * a + 1, 2 * b + 1) += v;
        }
    }
  }
  out.flux_u = out.r_u.cwiseAbs();
  out.flux_phi = drive.cwiseAbs();
  if (inertia) {
    out.r_u.noalias() += out.M * (*in.acceleration);
    if (in.want_tangent) {
      if (!(in.dt > 0.0)) throw ElementError("inertial tangent needs dt > 0");
      out.K_uu += out.M / (in.dt * in.dt);
    }
  }
  return out;
}

ElemMat element_mass(int order, const NodeCoords& coords, double rho, double thickness) {
  const int m = order == 1 ? 4 : 8;
  ElemMat M = ElemMat::Zero(2 * m, 2 * m);
  const ElemVec zero = ElemVec::Zero(2 * m);
  for (const auto& qp : gauss_rule(order)) {
    const Kinematics kin = kinematics(order, coords, qp.xi, qp.eta, zero);
    const double rdv = rho * kin.detJ * qp.weight * thickness;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        M(2 * a, 2 * b) += rdv * kin.N(a) * kin.N(b);
        M(2 * a + 1, 2 * b + 1) += rdv * kin.N(a) * kin.N(b);
      }
  }
  return M;
}

std::array<SplitResult, 9> ip_energies(int order, const NodeCoords& coords, const ElemVec& u_e,
                                       const MaterialParams& params, Split split) {
  std::array<SplitResult, 9> out{};
  const auto rule = gauss_rule(order);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Kinematics kin = kinematics(order, coords, rule[q].xi, rule[q].eta, u_e);
    out[q] = split_energy(kin.strain, params, split);
  }
  return out;
}

std::array<double, 9> ip_phase(int order, const ElemVec& phi_e) {
  std::array<double, 9> out{};
  const auto rule = gauss_rule(order);
  for (std::size_t q = 0; q < rule.size(); ++q)
    out[q] = shape_eval(order, rule[q].xi, rule[q].eta).N.dot(phi_e);
  return out;
}

double element_strain_energy(const ElementInput& in, const MaterialParams& params) {
  double energy = 0.0;
  for (const auto& qp : gauss_rule(in.order)) {
    const Kinematics kin = kinematics(in.order, in.coords, qp.xi, qp.eta, in.u);
    const double phi = kin.N.dot(in.phi);
    const double psi0 = split_energy(kin.strain, params, Split::Isotropic).psi;
    energy += (degradation(phi) + params.k) * psi0 * kin.detJ * qp.weight * in.thickness;
  }
  return energy;
}

double element_fracture_energy(const ElementInput& in, const MaterialParams& params) {
  double energy = 0.0;
  const auto rule = gauss_rule(in.order);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto& qp = rule[q];
    const Kinematics kin = kinematics(in.order, in.coords, qp.xi, qp.eta, in.u);
    const double phi = kin.N.dot(in.phi);
    const Eigen::Vector2d grad = kin.Bphi * in.phi;
    const double f = in.fatigue.empty() ? 1.0 : in.fatigue[q];
    energy += f * params.Gc * (phi * phi / (2.0 * params.ell) + 0.5 * params.ell * grad.squaredNorm()) *
              kin.detJ * qp.weight * in.thickness;
  }
  return energy;
}

double element_history_energy(const ElementInput& in) {
  double energy = 0.0;
  const auto rule = gauss_rule(in.order);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto& qp = rule[q];
    const Kinematics kin = kinematics(in.order, in.coords, qp.xi, qp.eta, in.u);
    const double phi = kin.N.dot(in.phi);
    energy += degradation(phi) * in.H[q] * kin.detJ * qp.weight * in.thickness;
  }
  return energy;
}

}  // namespace phasefrac
