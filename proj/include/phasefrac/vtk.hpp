#pragma once

#include "phasefrac/assembly.hpp"
#include "phasefrac/mesh.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace phasefrac {

/// Legacy ASCII VTK unstructured grid. Point data u (3 components, z = 0)
/// and phi, cell data H; fields that are empty are omitted.
void write_vtk(std::ostream& os, const Mesh& mesh, const Eigen::VectorXd& u,
               const Eigen::VectorXd& phi, const std::vector<double>& cell_H);
void write_vtk(const std::string& path, const Mesh& mesh, const Eigen::VectorXd& u,
               const Eigen::VectorXd& phi, const std::vector<double>& cell_H);
void write_mesh_vtk(const std::string& path, const Mesh& mesh);

/// Structural check of a legacy VTK file: header, dataset type, point and
/// cell counts, cell types and attribute sizes. Returns the problems found.
std::vector<std::string> lint_vtk(std::istream& is);
std::vector<std::string> lint_vtk_file(const std::string& path);

}  // namespace phasefrac
