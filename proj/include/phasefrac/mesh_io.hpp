#pragma once

#include "phasefrac/mesh.hpp"

#include <iosfwd>
#include <string>

namespace phasefrac {

// Line-oriented ASCII mesh format, see docs/mesh_format.md.
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

void write_mesh_file(const std::string& path, const Mesh& mesh);
Mesh read_mesh_file(const std::string& path);

}  // namespace phasefrac
