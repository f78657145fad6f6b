#pragma once

#include "phasefrac/mesh.hpp"

#include <Eigen/Dense>

#include <vector>

namespace phasefrac {

/// Free-dof numbering for the stacked unknown z = {u, phi}. Displacement
/// equations come first (0 .. num_u-1), phase equations follow
/// (num_u .. num_u+num_phi-1). Constrained dofs carry -1.
class DofMap {
public:
  struct Constraint {
    int dof;      // global dof: 2*node + c for u, 2*num_nodes + node for phi
    double value;
    bool ramped;
  };

  DofMap() = default;
  DofMap(int num_nodes, const std::vector<DirichletSpec>& specs);

  int num_nodes() const { return num_nodes_; }
  int num_u() const { return num_u_; }
  int num_phi() const { return num_phi_; }
  int num_free() const { return num_u_ + num_phi_; }
  int num_total() const { return 3 * num_nodes_; }

  /// Equation of displacement component c of node n, or -1.
  int u_eq(int node, int c) const { return eq_[2 * node + c]; }
  /// Equation of the phase dof of node n (offset by num_u), or -1.
  int phi_eq(int node) const { return eq_[2 * num_nodes_ + node]; }
  int eq(int global_dof) const { return eq_[global_dof]; }

  const std::vector<Constraint>& constraints() const { return constraints_; }

  /// Writes prescribed values for load factor lambda into the nodal vectors.
  void apply_constraints(double lambda, Eigen::VectorXd& u, Eigen::VectorXd& phi) const;

  /// Gathers free dofs of (u, phi) into z.
  Eigen::VectorXd gather(const Eigen::VectorXd& u, const Eigen::VectorXd& phi) const;
  /// Adds dz into the free entries of (u, phi).
  void scatter_add(const Eigen::VectorXd& dz, Eigen::VectorXd& u, Eigen::VectorXd& phi,
                   double scale = 1.0) const;

private:
  int num_nodes_ = 0;
  int num_u_ = 0;
  int num_phi_ = 0;
  std::vector<int> eq_;
  std::vector<Constraint> constraints_;
};

DofMap build_dof_map(const Mesh& mesh, const std::vector<DirichletSpec>& specs);

}  // namespace phasefrac
