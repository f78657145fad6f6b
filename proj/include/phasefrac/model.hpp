#pragma once

#include "phasefrac/assembly.hpp"
#include "phasefrac/dof_map.hpp"
#include "phasefrac/fem.hpp"
#include "phasefrac/mesh.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace phasefrac {

/// Nodes along which the crack length is measured, and the point it is
/// measured from.
struct Ligament {
  Point2 tip;
  std::vector<int> nodes;
};

/// Everything an increment solve needs that does not change during a run.
/// Holds references between its members, so it is neither copied nor moved.
class Problem {
public:
  Problem(Mesh mesh, const MaterialParams& params, Split split, std::vector<DirichletSpec> bcs);
  Problem(const Problem&) = delete;
  Problem& operator=(const Problem&) = delete;

  const Mesh& mesh() const { return mesh_; }
  const DofMap& dofs() const { return dofs_; }
  const Assembler& assembler() const { return *assembler_; }
  const MaterialParams& params() const { return assembler_->params(); }
  Split split() const { return assembler_->split(); }
  const std::vector<DirichletSpec>& bcs() const { return bcs_; }

  /// Nodal forces at unit force factor (2 * num_nodes); empty if unloaded.
  Eigen::VectorXd external;
  std::vector<int> reaction_nodes;
  int reaction_component = 1;
  /// Magnitude of the ramped displacement, reported as u_applied.
  double control_displacement = 0.0;
  std::optional<Ligament> ligament;

  /// Zero fields with the fixed phase prescriptions applied.
  SolutionState initial_state(bool dynamic = false) const;

private:
  Mesh mesh_;
  std::vector<DirichletSpec> bcs_;
  DofMap dofs_;
  std::unique_ptr<Assembler> assembler_;
};

}  // namespace phasefrac
