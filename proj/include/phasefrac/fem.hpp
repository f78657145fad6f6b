#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace phasefrac {

class ElementError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Units: MPa, mm, N, tonne/mm^3, s.
struct MaterialParams {
  double E = 210000.0;  // MPa
  double nu = 0.3;
  double Gc = 2.7;      // N/mm
  double ell = 0.024;   // mm
  double rho = 0.0;     // tonne/mm^3
  double k = 1e-7;      // residual stiffness of fully broken material

  double lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
  double mu() const { return E / (2.0 * (1.0 + nu)); }
  /// Plane-strain bulk modulus K_n = lambda + 2 mu / n, n = 2.
  double bulk() const { return lambda() + mu(); }
  void validate() const;
};

enum class Split { Isotropic, VolumetricDeviatoric, Spectral };

Split parse_split(const std::string& name);
std::string to_string(Split split);

/// Voigt strain {exx, eyy, gxy} with engineering shear gxy = 2 exy.
using Voigt = Eigen::Vector3d;

struct SplitResult {
  double psi_plus = 0.0;
  double psi_minus = 0.0;
  double psi = 0.0;
  Voigt stress = Voigt::Zero();  // undamaged sigma0 = C0 : eps
};

Eigen::Matrix3d plane_strain_stiffness(const MaterialParams& params);

SplitResult split_energy(const Voigt& strain, const MaterialParams& params, Split split);

/// H = max(H_prev, psi_plus); both arguments must be non-negative.
double update_history(double H_prev, double psi_plus);

inline double degradation(double phi) { return (1.0 - phi) * (1.0 - phi); }

// Element-local storage. At most 8 nodes, 16 displacement dofs.
using ElemVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 16, 1>;
using ElemMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 16, 16>;
using NodeCoords = Eigen::Matrix<double, Eigen::Dynamic, 2, 0, 8, 2>;

struct ShapeValues {
  Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 8, 1> N;
  Eigen::Matrix<double, Eigen::Dynamic, 2, 0, 8, 2> dN;  // columns d/dxi, d/deta
};

/// Bilinear Q4 (order 1) or serendipity Q8 (order 2) on [-1, 1]^2.
/// Corner nodes counter-clockwise from (-1,-1); Q8 mid-side nodes follow,
/// starting with the bottom edge.
ShapeValues shape_eval(int order, double xi, double eta);

struct QuadraturePoint {
  double xi, eta, weight;
};

/// 2x2 Gauss for order 1, 3x3 for order 2.
std::span<const QuadraturePoint> gauss_rule(int order);

struct Kinematics {
  Eigen::Matrix<double, 3, Eigen::Dynamic, 0, 3, 16> Bu;
  Eigen::Matrix<double, 2, Eigen::Dynamic, 0, 2, 8> Bphi;
  Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 8, 1> N;
  double detJ = 0.0;
  Voigt strain = Voigt::Zero();
};

/// Throws ElementError when detJ <= 0.
Kinematics kinematics(int order, const NodeCoords& coords, double xi, double eta,
                      const ElemVec& u_e);

/// Inputs of one element evaluation. H and the fatigue factor are given per
/// integration point; an empty fatigue span means f = 1 everywhere.
struct ElementInput {
  int order = 1;
  NodeCoords coords;
  ElemVec u;
  ElemVec phi;
  std::span<const double> H;
  std::span<const double> fatigue;
  double thickness = 1.0;
  /// Nodal accelerations for the inertial term; dt scales the mass into K_uu.
  std::optional<ElemVec> acceleration;
  double dt = 0.0;
  bool want_tangent = true;
  bool want_mass = false;
};

struct ElementContribution {
  ElemVec r_u;
  ElemVec r_phi;
  ElemMat K_uu;
  ElemMat K_phiphi;
  ElemMat M;
  /// |element contribution| per dof, used for the flux norms of the
  /// convergence test: internal force for u, crack driving force for phi.
  ElemVec flux_u;
  ElemVec flux_phi;
};

ElementContribution element_residual_and_tangent(const ElementInput& in,
                                                 const MaterialParams& params);

/// Consistent mass, rho * int N^T N dV, 2m x 2m.
ElemMat element_mass(int order, const NodeCoords& coords, double rho, double thickness);

/// Integration-point energies of the undamaged material.
std::array<SplitResult, 9> ip_energies(int order, const NodeCoords& coords, const ElemVec& u_e,
                                       const MaterialParams& params, Split split);

/// Phase field interpolated to the integration points.
std::array<double, 9> ip_phase(int order, const ElemVec& phi_e);

/// int [(1 - phi)^2 + k] psi0 dV
double element_strain_energy(const ElementInput& in, const MaterialParams& params);

/// int Gc (phi^2 / (2 ell) + ell / 2 |grad phi|^2) dV, scaled by f per point.
double element_fracture_energy(const ElementInput& in, const MaterialParams& params);

/// int (1 - phi)^2 H dV; with H = psi0 its phi-derivative is the driving term.
double element_history_energy(const ElementInput& in);

}  // namespace phasefrac
