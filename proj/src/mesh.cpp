#include "phasefrac/mesh.hpp"

#include "phasefrac/fem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace phasefrac {

namespace {

/// Grid coordinates along one axis. Breakpoints split the axis; each piece
/// uses the fine spacing if it lies inside [fine_lo, fine_hi].
std::vector<double> axis_lines(double length, double he, std::vector<double> breaks,
                               std::optional<std::pair<double, double>> fine, double he_fine) {
  const double eps = 1e-12 * length;
  breaks.push_back(0.0);
  breaks.push_back(length);
  if (fine) {
    breaks.push_back(std::clamp(fine->first, 0.0, length));
    breaks.push_back(std::clamp(fine->second, 0.0, length));
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [eps](double a, double b) { return std::abs(a - b) <= eps; }),
               breaks.end());

  std::vector<double> lines{breaks.front()};
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i];
    const double b = breaks[i + 1];
    const double mid = 0.5 * (a + b);
    double h = he;
    if (fine && mid >= fine->first - eps && mid <= fine->second + eps) h = he_fine;
    const int n = std::max(1, static_cast<int>(std::lround((b - a) / h)));
    for (int k = 1; k <= n; ++k) lines.push_back(k == n ? b : a + (b - a) * k / n);
  }
  return lines;
}

std::vector<double> with_midpoints(const std::vector<double>& lines) {
  std::vector<double> out;
  out.reserve(2 * lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) out.push_back(0.5 * (lines[i - 1] + lines[i]));
    out.push_back(lines[i]);
  }
  return out;
}

bool inside_domain(const Point2& p, double w, double h, double tol) {
  return p.x >= -tol && p.x <= w + tol && p.y >= -tol && p.y <= h + tol;
}

}  // namespace

const std::vector<int>& Mesh::node_set(const std::string& name) const {
  auto it = node_sets.find(name);
  if (it == node_sets.end()) throw MeshError("unknown node set '" + name + "'");
  return it->second;
}

double Mesh::domain_size() const {
  if (nodes.empty()) return 0.0;
  double xmin = nodes[0].x, xmax = xmin, ymin = nodes[0].y, ymax = ymin;
  for (const auto& p : nodes) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  return std::max(xmax - xmin, ymax - ymin);
}

double Mesh::min_element_size() const {
  double h = std::numeric_limits<double>::infinity();
  for (int e = 0; e < num_elements(); ++e) {
    auto conn = element(e);
    for (int c = 0; c < 4; ++c) {
      const auto& a = nodes[conn[c]];
      const auto& b = nodes[conn[(c + 1) % 4]];
      h = std::min(h, std::hypot(a.x - b.x, a.y - b.y));
    }
  }
  return h;
}

void Mesh::validate() const {
  if (order != 1 && order != 2) throw MeshError("element order must be 1 or 2");
  if (connectivity.size() % static_cast<std::size_t>(nodes_per_element()) != 0)
    throw MeshError("connectivity length is not a multiple of the element node count");
  const int n = num_nodes();
  for (int idx : connectivity)
    if (idx < 0 || idx >= n) throw MeshError("element references node " + std::to_string(idx));
  for (const auto& [name, set] : node_sets)
    for (int idx : set)
      if (idx < 0 || idx >= n) throw MeshError("node set '" + name + "' references invalid node");
  for (const auto& [name, set] : element_sets)
    for (int idx : set)
      if (idx < 0 || idx >= num_elements())
        throw MeshError("element set '" + name + "' references invalid element");

  const int npe = nodes_per_element();
  ElemVec zero = ElemVec::Zero(2 * npe);
  for (int e = 0; e < num_elements(); ++e) {
    NodeCoords xy(npe, 2);
    auto conn = element(e);
    for (int a = 0; a < npe; ++a) xy.row(a) << nodes[conn[a]].x, nodes[conn[a]].y;
    for (const auto& qp : gauss_rule(order)) {
      try {
        kinematics(order, xy, qp.xi, qp.eta, zero);
      } catch (const ElementError&) {
        throw MeshError("element " + std::to_string(e) + " has a non-positive Jacobian");
      }
    }
  }
}

bool Region::contains(const Point2& p, double tol) const {
  if (x && std::abs(p.x - *x) > tol) return false;
  if (y && std::abs(p.y - *y) > tol) return false;
  if (x_min && p.x < *x_min - tol) return false;
  if (x_max && p.x > *x_max + tol) return false;
  if (y_min && p.y < *y_min - tol) return false;
  if (y_max && p.y > *y_max + tol) return false;
  return true;
}

std::vector<int> resolve_boundary_set(const Mesh& mesh, const Region& region) {
  const double tol = 1e-9 * mesh.domain_size();
  std::vector<int> out;
  for (int i = 0; i < mesh.num_nodes(); ++i)
    if (region.contains(mesh.nodes[i], tol)) out.push_back(i);
  if (out.empty()) throw MeshError("boundary region matches no nodes");
  return out;
}

Mesh generate_structured_quad_mesh(double width, double height, double he,
                                   const std::optional<NotchSpec>& notch, int element_order,
                                   const std::optional<RefinementBand>& band) {
  if (!(width > 0.0 && height > 0.0 && he > 0.0))
    throw MeshError("width, height and he must be positive");
  if (he >= std::min(width, height)) throw MeshError("he must be smaller than the domain");
  if (element_order != 1 && element_order != 2) throw MeshError("element order must be 1 or 2");
  if (band && !(band->he > 0.0 && band->x1 > band->x0 && band->y1 > band->y0))
    throw MeshError("invalid refinement band");

  const double tol = 1e-9 * std::max(width, height);
  std::vector<double> xbreaks, ybreaks;
  bool duplicate = false;
  if (notch) {
    if (!inside_domain(notch->start, width, height, tol) ||
        !inside_domain(notch->end, width, height, tol))
      throw MeshError("notch lies outside the domain");
    if (notch->representation == NotchRepresentation::DuplicatedNodes) {
      if (std::abs(notch->start.y - notch->end.y) > tol)
        throw MeshError("duplicated-node notches must be horizontal");
      if (std::abs(notch->start.x - notch->end.x) > tol) duplicate = true;
      xbreaks.push_back(notch->start.x);
      xbreaks.push_back(notch->end.x);
      ybreaks.push_back(notch->start.y);
    }
  }

  std::optional<std::pair<double, double>> fx, fy;
  const double he_fine = band ? band->he : he;
  if (band) {
    fx = std::make_pair(band->x0, band->x1);
    fy = std::make_pair(band->y0, band->y1);
  }
  std::vector<double> xs = axis_lines(width, he, xbreaks, fx, he_fine);
  std::vector<double> ys = axis_lines(height, he, ybreaks, fy, he_fine);
  const int ex = static_cast<int>(xs.size()) - 1;
  const int ey = static_cast<int>(ys.size()) - 1;
  if (element_order == 2) {
    xs = with_midpoints(xs);
    ys = with_midpoints(ys);
  }

  Mesh mesh;
  mesh.order = element_order;
  const int nx = static_cast<int>(xs.size());
  const int ny = static_cast<int>(ys.size());
  std::vector<int> id(static_cast<std::size_t>(nx) * ny, -1);
  auto lattice = [&](int i, int j) -> int& { return id[static_cast<std::size_t>(j) * nx + i]; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (element_order == 2 && i % 2 == 1 && j % 2 == 1) continue;  // no Q8 centre node
      lattice(i, j) = mesh.num_nodes();
      mesh.nodes.push_back({xs[i], ys[j]});
    }

  // Element rows whose bottom or top edge lies on the notch line.
  const int s = element_order == 2 ? 2 : 1;
  int notch_row = -1;
  std::vector<int> dup_of;
  if (duplicate) {
    for (int j = 0; j < ny; ++j)
      if (std::abs(ys[j] - notch->start.y) <= tol) notch_row = j;
    const double xa = std::min(notch->start.x, notch->end.x);
    const double xb = std::max(notch->start.x, notch->end.x);
    const bool a_on_boundary = xa <= tol;
    const bool b_on_boundary = xb >= width - tol;
    const bool interior_row = notch_row > 0 && notch_row < ny - 1;
    dup_of.assign(nx, -1);
    for (int i = 0; i < nx && interior_row; ++i) {
      const double x = xs[i];
      const bool strictly = x > xa + tol && x < xb - tol;
      const bool end_a = std::abs(x - xa) <= tol && a_on_boundary;
      const bool end_b = std::abs(x - xb) <= tol && b_on_boundary;
      if (!(strictly || end_a || end_b) || lattice(i, notch_row) < 0) continue;
      dup_of[i] = mesh.num_nodes();
      mesh.nodes.push_back(mesh.nodes[lattice(i, notch_row)]);
    }
  }

  auto node_at = [&](int i, int j, bool above_notch) {
    if (above_notch && j == notch_row && dup_of[i] >= 0) return dup_of[i];
    return lattice(i, j);
  };
  for (int ej = 0; ej < ey; ++ej)
    for (int ei = 0; ei < ex; ++ei) {
      const int i0 = ei * s, j0 = ej * s, i1 = i0 + s, j1 = j0 + s;
      const bool above = notch_row >= 0 && j0 == notch_row;
      mesh.connectivity.insert(mesh.connectivity.end(),
                               {node_at(i0, j0, above), node_at(i1, j0, above),
                                node_at(i1, j1, above), node_at(i0, j1, above)});
      if (element_order == 2) {
        const int im = i0 + 1, jm = j0 + 1;
        mesh.connectivity.insert(mesh.connectivity.end(),
                                 {node_at(im, j0, above), node_at(i1, jm, above),
                                  node_at(im, j1, above), node_at(i0, jm, above)});
      }
    }

  mesh.node_sets["bottom"] = resolve_boundary_set(mesh, Region::line_y(0.0));
  mesh.node_sets["top"] = resolve_boundary_set(mesh, Region::line_y(height));
  mesh.node_sets["left"] = resolve_boundary_set(mesh, Region::line_x(0.0));
  mesh.node_sets["right"] = resolve_boundary_set(mesh, Region::line_x(width));
  std::vector<int> all(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) all[e] = e;
  mesh.element_sets["all"] = std::move(all);
  mesh.validate();
  return mesh;
}

DirichletSpec make_dirichlet(const Mesh& mesh, Field field, const std::string& set, double value,
                             bool ramped) {
  if (field == Field::Phase && value != 1.0)
    throw MeshError("phase prescriptions are restricted to phi = 1");
  DirichletSpec spec;
  spec.field = field;
  spec.node_set = set;
  spec.nodes = mesh.node_set(set);
  spec.value = value;
  spec.ramped = ramped;
  return spec;
}

double distance_to_segment(const Point2& p, const Point2& a, const Point2& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

DirichletSpec prescribe_initial_crack(const Mesh& mesh, const NotchSpec& notch) {
  if (notch.representation != NotchRepresentation::PhaseFieldPrescribed)
    throw MeshError("initial crack prescription needs a phase-field notch");
  double xmin = mesh.nodes.at(0).x, xmax = xmin, ymin = mesh.nodes[0].y, ymax = ymin;
  for (const auto& p : mesh.nodes) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double tol = 1e-9 * mesh.domain_size();
  auto inside = [&](const Point2& p) {
    return p.x >= xmin - tol && p.x <= xmax + tol && p.y >= ymin - tol && p.y <= ymax + tol;
  };
  if (!inside(notch.start) || !inside(notch.end)) throw MeshError("notch lies outside the domain");

  const double radius = 0.5 * mesh.min_element_size() - tol;
  DirichletSpec spec;
  spec.field = Field::Phase;
  spec.node_set = "initial_crack";
  spec.value = 1.0;
  for (int i = 0; i < mesh.num_nodes(); ++i)
    if (distance_to_segment(mesh.nodes[i], notch.start, notch.end) < radius) spec.nodes.push_back(i);
  if (spec.nodes.empty()) throw MeshError("no nodes lie on the initial crack");
  return spec;
}

}  // namespace phasefrac
