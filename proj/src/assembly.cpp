#include "phasefrac/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace phasefrac {

namespace {

int find_slot(const SparseMatrix& A, int row, int col) {
  const int* inner = A.innerIndexPtr();
  const int begin = A.outerIndexPtr()[col];
  const int end = A.outerIndexPtr()[col + 1];
  const int* it = std::lower_bound(inner + begin, inner + end, row);
  return static_cast<int>(it - inner);
}

// Element equation numbers, u block then phi block (phi offset removed).
void element_equations(const DofMap& dofs, std::span<const int> conn, std::vector<int>& eq_u,
                       std::vector<int>& eq_phi) {
  const int m = static_cast<int>(conn.size());
  eq_u.resize(2 * m);
  eq_phi.resize(m);
  for (int a = 0; a < m; ++a) {
    eq_u[2 * a] = dofs.u_eq(conn[a], 0);
    eq_u[2 * a + 1] = dofs.u_eq(conn[a], 1);
    const int p = dofs.phi_eq(conn[a]);
    eq_phi[a] = p >= 0 ? p - dofs.num_u() : -1;
  }
}

SparseMatrix build_pattern(int n, const std::vector<std::vector<int>>& element_eqs) {
  std::vector<Eigen::Triplet<double>> trips;
  for (const auto& eqs : element_eqs)
    for (int i : eqs)
      for (int j : eqs)
        if (i >= 0 && j >= 0) trips.emplace_back(i, j, 0.0);
  SparseMatrix A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  return A;
}

}  // namespace

int assembly_threads() {
  int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("PHASEFRAC_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) return std::min(cap, hw);
  }
  return hw;
}

Assembler::Assembler(const Mesh& mesh, const DofMap& dofs, const MaterialParams& params, Split split)
    : mesh_(&mesh), dofs_(&dofs), params_(params), split_(split) {
  params_.validate();
  npe_ = mesh.nodes_per_element();
  nip_ = static_cast<int>(gauss_rule(mesh.order).size());
  threads_ = assembly_threads();
  const int ne = mesh.num_elements();
  coords_.resize(ne);
  std::vector<std::vector<int>> eqs_u(ne), eqs_phi(ne);
  for (int e = 0; e < ne; ++e) {
    auto conn = mesh.element(e);
    coords_[e].resize(npe_, 2);
    for (int a = 0; a < npe_; ++a) coords_[e].row(a) << mesh.nodes[conn[a]].x, mesh.nodes[conn[a]].y;
    element_equations(dofs, conn, eqs_u[e], eqs_phi[e]);
  }
  pattern_u_ = build_pattern(dofs.num_u(), eqs_u);
  pattern_phi_ = build_pattern(dofs.num_phi(), eqs_phi);

  const int nu = 2 * npe_;
  slot_u_.assign(static_cast<std::size_t>(ne) * nu * nu, -1);
  slot_phi_.assign(static_cast<std::size_t>(ne) * npe_ * npe_, -1);
  for (int e = 0; e < ne; ++e) {
    for (int a = 0; a < nu; ++a)
      for (int b = 0; b < nu; ++b)
        if (eqs_u[e][a] >= 0 && eqs_u[e][b] >= 0)
          slot_u_[(static_cast<std::size_t>(e) * nu + a) * nu + b] =
              find_slot(pattern_u_, eqs_u[e][a], eqs_u[e][b]);
    for (int a = 0; a < npe_; ++a)
      for (int b = 0; b < npe_; ++b)
        if (eqs_phi[e][a] >= 0 && eqs_phi[e][b] >= 0)
          slot_phi_[(static_cast<std::size_t>(e) * npe_ + a) * npe_ + b] =
              find_slot(pattern_phi_, eqs_phi[e][a], eqs_phi[e][b]);
  }
}

ElementInput Assembler::element_input(int e, const Eigen::VectorXd& u,
                                      const Eigen::VectorXd& phi) const {
  ElementInput in;
  in.order = mesh_->order;
  in.coords = coords_[e];
  in.thickness = mesh_->thickness;
  in.u.resize(2 * npe_);
  in.phi.resize(npe_);
  auto conn = mesh_->element(e);
  for (int a = 0; a < npe_; ++a) {
    in.u(2 * a) = u(2 * conn[a]);
    in.u(2 * a + 1) = u(2 * conn[a] + 1);
    in.phi(a) = phi(conn[a]);
  }
  return in;
}

AssemblyResult Assembler::assemble(const Eigen::VectorXd& u, const Eigen::VectorXd& phi,
                                   std::span<const double> H_prev,
                                   const AssemblyOptions& opts) const {
  const int ne = mesh_->num_elements();
  const int nn = mesh_->num_nodes();
  const int nu_dof = dofs_->num_u();
  if (static_cast<int>(H_prev.size()) != num_ips())
    throw std::invalid_argument("history size does not match the mesh");

  AssemblyResult out;
  out.R.setZero(dofs_->num_free());
  out.internal_u.setZero(2 * nn);
  out.H.resize(num_ips());
  Eigen::VectorXd flux_u = Eigen::VectorXd::Zero(2 * nn);
  Eigen::VectorXd flux_phi = Eigen::VectorXd::Zero(nn);
  if (opts.tangent_u) {
    out.K_uu = pattern_u_;
    std::fill_n(out.K_uu.valuePtr(), out.K_uu.nonZeros(), 0.0);
  }
  if (opts.tangent_phi) {
    out.K_phiphi = pattern_phi_;
    std::fill_n(out.K_phiphi.valuePtr(), out.K_phiphi.nonZeros(), 0.0);
  }

  // Element kernels run in parallel over a block; the scatter below is
  // serial and in element order, so results do not depend on the thread count.
  constexpr int kBlock = 512;
  std::vector<ElementContribution> buffer(std::min(kBlock, ne));
  const int nu_loc = 2 * npe_;

  for (int start = 0; start < ne; start += kBlock) {
    const int stop = std::min(ne, start + kBlock);
#pragma omp parallel for schedule(static) num_threads(threads_) if (threads_ > 1)
    for (int e = start; e < stop; ++e) {
      ElementInput in = element_input(e, u, phi);
      double* H = out.H.data() + static_cast<std::size_t>(e) * nip_;
      const double* Hp = H_prev.data() + static_cast<std::size_t>(e) * nip_;
      if (opts.update_history) {
        const auto energies = phasefrac::ip_energies(in.order, in.coords, in.u, params_, split_);
        for (int q = 0; q < nip_; ++q) H[q] = update_history(Hp[q], energies[q].psi_plus);
      } else {
        std::copy(Hp, Hp + nip_, H);
      }
      in.H = {H, static_cast<std::size_t>(nip_)};
      if (!opts.fatigue.empty())
        in.fatigue = opts.fatigue.subspan(static_cast<std::size_t>(e) * nip_, nip_);
      in.want_tangent = opts.tangent_u || opts.tangent_phi;
      if (opts.inertia) {
        const auto& ic = *opts.inertia;
        ElemVec acc(nu_loc);
        auto conn = mesh_->element(e);
        for (int a = 0; a < npe_; ++a)
          for (int c = 0; c < 2; ++c) {
            const int d = 2 * conn[a] + c;
            acc(2 * a + c) = ((u(d) - (*ic.u_prev)(d)) / ic.dt - (*ic.v_prev)(d)) / ic.dt;
          }
        in.acceleration = acc;
        in.dt = ic.dt;
      }
      buffer[e - start] = element_residual_and_tangent(in, params_);
    }

    for (int e = start; e < stop; ++e) {
      const auto& ec = buffer[e - start];
      auto conn = mesh_->element(e);
      for (int a = 0; a < npe_; ++a) {
        for (int c = 0; c < 2; ++c) {
          const int d = 2 * conn[a] + c;
          out.internal_u(d) += ec.r_u(2 * a + c);
          flux_u(d) += ec.flux_u(2 * a + c);
        }
        flux_phi(conn[a]) += ec.flux_phi(a);
        const int p = dofs_->phi_eq(conn[a]);
        if (p >= 0) out.R(p) += ec.r_phi(a);
      }
      if (opts.tangent_u) {
        const int* slots = slot_u_.data() + static_cast<std::size_t>(e) * nu_loc * nu_loc;
        double* vals = out.K_uu.valuePtr();
        for (int a = 0; a < nu_loc; ++a)
          for (int b = 0; b < nu_loc; ++b) {
            const int s = slots[a * nu_loc + b];
            if (s >= 0) vals[s] += ec.K_uu(a, b);
          }
      }
      if (opts.tangent_phi) {
        const int* slots = slot_phi_.data() + static_cast<std::size_t>(e) * npe_ * npe_;
        double* vals = out.K_phiphi.valuePtr();
        for (int a = 0; a < npe_; ++a)
          for (int b = 0; b < npe_; ++b) {
            const int s = slots[a * npe_ + b];
            if (s >= 0) vals[s] += ec.K_phiphi(a, b);
          }
      }
    }
  }

  for (int d = 0; d < 2 * nn; ++d) {
    const int q = dofs_->eq(d);
    if (q < 0) continue;
    double r = out.internal_u(d);
    if (opts.external) r -= (*opts.external)(d);
    out.R(q) = r;
  }
  (void)nu_dof;
  out.flux_u = flux_u.mean();
  out.flux_phi = flux_phi.mean();
  return out;
}

std::vector<SplitResult> Assembler::ip_energies(const Eigen::VectorXd& u) const {
  std::vector<SplitResult> out(num_ips());
  const Eigen::VectorXd phi0 = Eigen::VectorXd::Zero(mesh_->num_nodes());
  for (int e = 0; e < mesh_->num_elements(); ++e) {
    const ElementInput in = element_input(e, u, phi0);
    const auto en = phasefrac::ip_energies(in.order, in.coords, in.u, params_, split_);
    std::copy_n(en.begin(), nip_, out.begin() + static_cast<std::ptrdiff_t>(e) * nip_);
  }
  return out;
}

std::vector<double> Assembler::ip_phase(const Eigen::VectorXd& phi) const {
  std::vector<double> out(num_ips());
  ElemVec phi_e(npe_);
  for (int e = 0; e < mesh_->num_elements(); ++e) {
    auto conn = mesh_->element(e);
    for (int a = 0; a < npe_; ++a) phi_e(a) = phi(conn[a]);
    const auto v = phasefrac::ip_phase(mesh_->order, phi_e);
    std::copy_n(v.begin(), nip_, out.begin() + static_cast<std::ptrdiff_t>(e) * nip_);
  }
  return out;
}

SparseMatrix Assembler::mass_matrix() const {
  const int nn = mesh_->num_nodes();
  std::vector<Eigen::Triplet<double>> trips;
  for (int e = 0; e < mesh_->num_elements(); ++e) {
    const ElemMat M = element_mass(mesh_->order, coords_[e], params_.rho, mesh_->thickness);
    auto conn = mesh_->element(e);
    for (int a = 0; a < 2 * npe_; ++a)
      for (int b = 0; b < 2 * npe_; ++b)
        if (M(a, b) != 0.0)
          trips.emplace_back(2 * conn[a / 2] + a % 2, 2 * conn[b / 2] + b % 2, M(a, b));
  }
  SparseMatrix M(2 * nn, 2 * nn);
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

double Assembler::strain_energy(const Eigen::VectorXd& u, const Eigen::VectorXd& phi) const {
  double total = 0.0;
  for (int e = 0; e < mesh_->num_elements(); ++e)
    total += element_strain_energy(element_input(e, u, phi), params_);
  return total;
}

std::vector<double> Assembler::element_mean(std::span<const double> ip_values) const {
  std::vector<double> out(mesh_->num_elements(), 0.0);
  for (int e = 0; e < mesh_->num_elements(); ++e) {
    double s = 0.0;
    for (int q = 0; q < nip_; ++q) s += ip_values[static_cast<std::size_t>(e) * nip_ + q];
    out[e] = s / nip_;
  }
  return out;
}

SparseSystem assemble(const Assembler& assembler, const SolutionState& state,
                      const AssemblyOptions& opts) {
  std::vector<double> H(state.ip.size());
  for (std::size_t i = 0; i < H.size(); ++i) H[i] = state.ip[i].H;
  AssemblyOptions o = opts;
  o.tangent_u = true;
  o.tangent_phi = true;
  AssemblyResult r = assembler.assemble(state.u, state.phi, H, o);

  SparseSystem sys;
  sys.num_u = assembler.dofs().num_u();
  sys.num_phi = assembler.dofs().num_phi();
  const int n = sys.num_u + sys.num_phi;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(r.K_uu.nonZeros() + r.K_phiphi.nonZeros());
  for (int j = 0; j < r.K_uu.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(r.K_uu, j); it; ++it)
      trips.emplace_back(it.row(), it.col(), it.value());
  for (int j = 0; j < r.K_phiphi.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(r.K_phiphi, j); it; ++it)
      trips.emplace_back(it.row() + sys.num_u, it.col() + sys.num_u, it.value());
  sys.K.resize(n, n);
  sys.K.setFromTriplets(trips.begin(), trips.end());
  sys.R = std::move(r.R);
  return sys;
}

double reaction(const Eigen::VectorXd& internal_u, std::span<const int> nodes, int c) {
  double sum = 0.0;
  for (int n : nodes) sum += internal_u(2 * n + c);
  return sum;
}

Eigen::VectorXd edge_traction_forces(const Mesh& mesh, const std::vector<int>& nodes, double tx,
                                     double ty) {
  std::unordered_set<int> in_set(nodes.begin(), nodes.end());
  Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * mesh.num_nodes());
  const double t = mesh.thickness;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto conn = mesh.element(e);
    for (int c = 0; c < 4; ++c) {
      const int a = conn[c];
      const int b = conn[(c + 1) % 4];
      if (!in_set.count(a) || !in_set.count(b)) continue;
      const double len = std::hypot(mesh.nodes[a].x - mesh.nodes[b].x,
                                    mesh.nodes[a].y - mesh.nodes[b].y);
      auto add = [&](int node, double w) {
        f(2 * node) += w * tx * len * t;
        f(2 * node + 1) += w * ty * len * t;
      };
      if (mesh.order == 1) {
        add(a, 0.5);
        add(b, 0.5);
      } else {
        add(a, 1.0 / 6.0);
        add(b, 1.0 / 6.0);
        add(conn[4 + c], 2.0 / 3.0);
      }
    }
  }
  return f;
}

}  // namespace phasefrac
