#include "phasefrac/model.hpp"

namespace phasefrac {

Problem::Problem(Mesh mesh, const MaterialParams& params, Split split,
                 std::vector<DirichletSpec> bcs)
    : mesh_(std::move(mesh)), bcs_(std::move(bcs)), dofs_(mesh_.num_nodes(), bcs_) {
  mesh_.validate();
  assembler_ = std::make_unique<Assembler>(mesh_, dofs_, params, split);
}

SolutionState Problem::initial_state(bool dynamic) const {
  SolutionState s;
  const int n = mesh_.num_nodes();
  s.u = Eigen::VectorXd::Zero(2 * n);
  s.phi = Eigen::VectorXd::Zero(n);
  s.ip.assign(assembler_->num_ips(), IpState{});
  dofs_.apply_constraints(0.0, s.u, s.phi);
  if (dynamic) {
    s.v = Eigen::VectorXd::Zero(2 * n);
    s.a = Eigen::VectorXd::Zero(2 * n);
  }
  return s;
}

}  // namespace phasefrac
