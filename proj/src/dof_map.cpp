#include "phasefrac/dof_map.hpp"

#include <stdexcept>

namespace phasefrac {

DofMap::DofMap(int num_nodes, const std::vector<DirichletSpec>& specs) : num_nodes_(num_nodes) {
  const int total = 3 * num_nodes;
  std::vector<int> owner(total, -1);
  for (std::size_t s = 0; s < specs.size(); ++s) {
    const auto& spec = specs[s];
    if (spec.field == Field::Phase && spec.value != 1.0)
      throw std::invalid_argument("phase prescriptions are restricted to phi = 1");
    for (int node : spec.nodes) {
      if (node < 0 || node >= num_nodes)
        throw std::invalid_argument("Dirichlet set '" + spec.node_set + "' references invalid node");
      int dof = 0;
      switch (spec.field) {
        case Field::DisplacementX: dof = 2 * node; break;
        case Field::DisplacementY: dof = 2 * node + 1; break;
        case Field::Phase: dof = 2 * num_nodes + node; break;
      }
      if (owner[dof] >= 0) {
        const auto& other = specs[owner[dof]];
        if (other.value != spec.value || other.ramped != spec.ramped)
          throw std::invalid_argument("conflicting Dirichlet prescriptions on node " +
                                      std::to_string(node) + " from sets '" + other.node_set +
                                      "' and '" + spec.node_set + "'");
        continue;
      }
      owner[dof] = static_cast<int>(s);
      constraints_.push_back({dof, spec.value, spec.ramped});
    }
  }

  eq_.assign(total, -1);
  for (int d = 0; d < 2 * num_nodes; ++d)
    if (owner[d] < 0) eq_[d] = num_u_++;
  for (int d = 2 * num_nodes; d < total; ++d)
    if (owner[d] < 0) eq_[d] = num_u_ + num_phi_++;
}

void DofMap::apply_constraints(double lambda, Eigen::VectorXd& u, Eigen::VectorXd& phi) const {
  for (const auto& c : constraints_) {
    const double v = c.ramped ? c.value * lambda : c.value;
    if (c.dof < 2 * num_nodes_)
      u(c.dof) = v;
    else
      phi(c.dof - 2 * num_nodes_) = v;
  }
}

Eigen::VectorXd DofMap::gather(const Eigen::VectorXd& u, const Eigen::VectorXd& phi) const {
  Eigen::VectorXd z(num_free());
  for (int d = 0; d < 2 * num_nodes_; ++d)
    if (eq_[d] >= 0) z(eq_[d]) = u(d);
  for (int n = 0; n < num_nodes_; ++n)
    if (eq_[2 * num_nodes_ + n] >= 0) z(eq_[2 * num_nodes_ + n]) = phi(n);
  return z;
}

void DofMap::scatter_add(const Eigen::VectorXd& dz, Eigen::VectorXd& u, Eigen::VectorXd& phi,
                         double scale) const {
  for (int d = 0; d < 2 * num_nodes_; ++d)
    if (eq_[d] >= 0) u(d) += scale * dz(eq_[d]);
  for (int n = 0; n < num_nodes_; ++n)
    if (eq_[2 * num_nodes_ + n] >= 0) phi(n) += scale * dz(eq_[2 * num_nodes_ + n]);
}

DofMap build_dof_map(const Mesh& mesh, const std::vector<DirichletSpec>& specs) {
  return DofMap(mesh.num_nodes(), specs);
}

}  // namespace phasefrac
