#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace phasefrac {

class MeshError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

enum class NotchRepresentation { DuplicatedNodes, PhaseFieldPrescribed };

/// Straight initial crack. Duplicated-node notches must be horizontal and
/// aligned with a grid line; phase-field notches may be arbitrary segments.
struct NotchSpec {
  Point2 start;
  Point2 end;
  NotchRepresentation representation = NotchRepresentation::DuplicatedNodes;
};

/// Rectangle meshed with a finer spacing than the rest of the domain.
struct RefinementBand {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  double he = 0.0;
};

/// Structured 2-D quadrilateral mesh (Q4 or serendipity Q8), zero-based
/// indices, counter-clockwise connectivity.
struct Mesh {
  std::vector<Point2> nodes;
  std::vector<int> connectivity;  // flat, nodes_per_element stride
  int order = 1;
  std::map<std::string, std::vector<int>> node_sets;
  std::map<std::string, std::vector<int>> element_sets;
  double thickness = 1.0;

  int nodes_per_element() const { return order == 1 ? 4 : 8; }
  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_elements() const {
    return static_cast<int>(connectivity.size()) / nodes_per_element();
  }
  std::span<const int> element(int e) const {
    const auto npe = static_cast<std::size_t>(nodes_per_element());
    return {connectivity.data() + static_cast<std::size_t>(e) * npe, npe};
  }
  const std::vector<int>& node_set(const std::string& name) const;

  /// Bounding box extent, used to scale geometric tolerances.
  double domain_size() const;
  /// Smallest element edge length (corner to corner).
  double min_element_size() const;

  /// Throws MeshError on invalid indices, bad sets or non-positive Jacobians.
  void validate() const;
};

/// Axis-aligned coordinate predicate. Unset members are not tested.
struct Region {
  std::optional<double> x;
  std::optional<double> y;
  std::optional<double> x_min, x_max, y_min, y_max;

  static Region line_x(double v) { Region r; r.x = v; return r; }
  static Region line_y(double v) { Region r; r.y = v; return r; }
  Region& and_x(double v) { x = v; return *this; }
  Region& and_y(double v) { y = v; return *this; }
  Region& within_x(double lo, double hi) { x_min = lo; x_max = hi; return *this; }
  Region& within_y(double lo, double hi) { y_min = lo; y_max = hi; return *this; }

  bool contains(const Point2& p, double tol) const;
};

Mesh generate_structured_quad_mesh(double width, double height, double he,
                                   const std::optional<NotchSpec>& notch,
                                   int element_order,
                                   const std::optional<RefinementBand>& band = std::nullopt);

/// Nodes inside the region, tolerance 1e-9 * domain size. Sorted ascending.
/// Throws MeshError if nothing matches.
std::vector<int> resolve_boundary_set(const Mesh& mesh, const Region& region);

enum class Field { DisplacementX, DisplacementY, Phase };

/// Prescribed value on a set of nodes. Ramped specs scale with the load
/// factor of the active load program; fixed ones do not.
struct DirichletSpec {
  Field field = Field::DisplacementX;
  std::string node_set;
  std::vector<int> nodes;
  double value = 0.0;
  bool ramped = false;
};

DirichletSpec make_dirichlet(const Mesh& mesh, Field field, const std::string& set,
                             double value, bool ramped = false);

/// phi = 1 on every node closer than he/2 to the notch segment.
DirichletSpec prescribe_initial_crack(const Mesh& mesh, const NotchSpec& notch);

double distance_to_segment(const Point2& p, const Point2& a, const Point2& b);

}  // namespace phasefrac
