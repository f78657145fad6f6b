#pragma once

#include "phasefrac/dof_map.hpp"
#include "phasefrac/fem.hpp"
#include "phasefrac/mesh.hpp"

#include <Eigen/Sparse>

#include <span>
#include <vector>

namespace phasefrac {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Per integration point internal variables.
struct IpState {
  double H = 0.0;          // history of the crack driving energy, MPa
  double alpha = 0.0;      // fatigue loading variable at the last converged state
  double alpha_bar = 0.0;  // cumulative fatigue variable
};

/// Nodal fields plus integration-point history. v and a are only sized for
/// dynamic runs.
struct SolutionState {
  Eigen::VectorXd u;    // 2 * num_nodes, interleaved (ux, uy)
  Eigen::VectorXd phi;  // num_nodes
  std::vector<IpState> ip;
  Eigen::VectorXd v;
  Eigen::VectorXd a;
  double time = 0.0;
};

/// Backward Euler data for the inertial term.
struct InertiaContext {
  double dt = 0.0;
  const Eigen::VectorXd* u_prev = nullptr;
  const Eigen::VectorXd* v_prev = nullptr;
};

struct AssemblyOptions {
  bool tangent_u = false;
  bool tangent_phi = false;
  /// When false, H_prev is used as is instead of max(H_prev, psi0_plus(u)).
  bool update_history = true;
  std::span<const double> fatigue;  // per integration point, empty means f = 1
  const InertiaContext* inertia = nullptr;
  const Eigen::VectorXd* external = nullptr;  // nodal external forces, 2 * num_nodes
};

struct AssemblyResult {
  Eigen::VectorXd R;           // free dofs: {r_u; r_phi}
  Eigen::VectorXd internal_u;  // all displacement dofs, internal + inertial force
  double flux_u = 0.0;         // spatial mean of |internal force|
  double flux_phi = 0.0;       // spatial mean of |crack driving force|
  std::vector<double> H;       // history used for this evaluation
  SparseMatrix K_uu;           // free u block
  SparseMatrix K_phiphi;       // free phi block
};

/// Global residual and block-diagonal tangent of the coupled problem. The
/// sparsity pattern and element-to-storage maps are built once.
class Assembler {
public:
  Assembler(const Mesh& mesh, const DofMap& dofs, const MaterialParams& params, Split split);

  const Mesh& mesh() const { return *mesh_; }
  const DofMap& dofs() const { return *dofs_; }
  const MaterialParams& params() const { return params_; }
  Split split() const { return split_; }
  int ips_per_element() const { return nip_; }
  int num_ips() const { return nip_ * mesh_->num_elements(); }

  AssemblyResult assemble(const Eigen::VectorXd& u, const Eigen::VectorXd& phi,
                          std::span<const double> H_prev, const AssemblyOptions& opts) const;

  /// Undamaged energies at every integration point for displacement u.
  std::vector<SplitResult> ip_energies(const Eigen::VectorXd& u) const;
  /// Phase field at every integration point.
  std::vector<double> ip_phase(const Eigen::VectorXd& phi) const;

  /// Consistent mass over all displacement dofs (2N x 2N).
  SparseMatrix mass_matrix() const;
  /// Stored elastic energy int [(1-phi)^2 + k] psi0 dV.
  double strain_energy(const Eigen::VectorXd& u, const Eigen::VectorXd& phi) const;
  /// Element input for element e with the given nodal fields.
  ElementInput element_input(int e, const Eigen::VectorXd& u, const Eigen::VectorXd& phi) const;

  /// Mean integration-point H per element, for output.
  std::vector<double> element_mean(std::span<const double> ip_values) const;

private:
  const Mesh* mesh_;
  const DofMap* dofs_;
  MaterialParams params_;
  Split split_;
  int nip_ = 4;
  int npe_ = 4;
  int threads_ = 1;
  std::vector<NodeCoords> coords_;
  SparseMatrix pattern_u_;
  SparseMatrix pattern_phi_;
  std::vector<int> slot_u_;    // per element, (2m)^2 entries, -1 if constrained
  std::vector<int> slot_phi_;  // per element, m^2 entries
};

/// Stacked system with both blocks in one matrix; the u-phi blocks are
/// structurally zero.
struct SparseSystem {
  SparseMatrix K;
  Eigen::VectorXd R;
  int num_u = 0;
  int num_phi = 0;
};

SparseSystem assemble(const Assembler& assembler, const SolutionState& state,
                      const AssemblyOptions& opts);

/// Sum of internal forces in direction c (0 = x, 1 = y) over a node set.
double reaction(const Eigen::VectorXd& internal_u, std::span<const int> nodes, int c);

/// Consistent nodal forces of a uniform traction acting on the element
/// edges whose nodes all belong to the set.
Eigen::VectorXd edge_traction_forces(const Mesh& mesh, const std::vector<int>& nodes,
                                     double tx, double ty);

/// Thread cap from PHASEFRAC_THREADS, falling back to the hardware count.
int assembly_threads();

}  // namespace phasefrac
