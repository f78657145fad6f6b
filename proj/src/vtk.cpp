#include "phasefrac/vtk.hpp"

#include "phasefrac/run_log.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace phasefrac {

void write_vtk(std::ostream& os, const Mesh& mesh, const Eigen::VectorXd& u,
               const Eigen::VectorXd& phi, const std::vector<double>& cell_H) {
  const int nn = mesh.num_nodes();
  const int ne = mesh.num_elements();
  const int npe = mesh.nodes_per_element();
  os << "# vtk DataFile Version 3.0\nphasefrac\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << nn << " double\n";
  for (const auto& p : mesh.nodes) os << format_double(p.x) << ' ' << format_double(p.y) << " 0\n";
  os << "CELLS " << ne << ' ' << ne * (npe + 1) << '\n';
  for (int e = 0; e < ne; ++e) {
    os << npe;
    for (int n : mesh.element(e)) os << ' ' << n;
    os << '\n';
  }
  os << "CELL_TYPES " << ne << '\n';
  for (int e = 0; e < ne; ++e) os << (npe == 4 ? 9 : 23) << '\n';
  if (u.size() == 2 * nn || phi.size() == nn) {
    os << "POINT_DATA " << nn << '\n';
    if (u.size() == 2 * nn) {
      os << "VECTORS u double\n";
      for (int n = 0; n < nn; ++n)
        os << format_double(u(2 * n)) << ' ' << format_double(u(2 * n + 1)) << " 0\n";
    }
    if (phi.size() == nn) {
      os << "SCALARS phi double 1\nLOOKUP_TABLE default\n";
      for (int n = 0; n < nn; ++n) os << format_double(phi(n)) << '\n';
    }
  }
  if (static_cast<int>(cell_H.size()) == ne) {
    os << "CELL_DATA " << ne << "\nSCALARS H double 1\nLOOKUP_TABLE default\n";
    for (double h : cell_H) os << format_double(h) << '\n';
  }
}

void write_vtk(const std::string& path, const Mesh& mesh, const Eigen::VectorXd& u,
               const Eigen::VectorXd& phi, const std::vector<double>& cell_H) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_vtk(os, mesh, u, phi, cell_H);
}

void write_mesh_vtk(const std::string& path, const Mesh& mesh) {
  write_vtk(path, mesh, Eigen::VectorXd(), Eigen::VectorXd(), {});
}

std::vector<std::string> lint_vtk(std::istream& is) {
  std::vector<std::string> errors;
  std::string line;
  auto next = [&](std::string& l) {
    while (std::getline(is, l))
      if (!l.empty()) return true;
    return false;
  };
  if (!std::getline(is, line) || line.rfind("# vtk DataFile Version", 0) != 0) {
    errors.push_back("missing vtk header");
    return errors;
  }
  std::getline(is, line);  // title
  if (!next(line) || line != "ASCII") errors.push_back("expected ASCII");
  if (!next(line) || line != "DATASET UNSTRUCTURED_GRID") {
    errors.push_back("expected DATASET UNSTRUCTURED_GRID");
    return errors;
  }
  long npts = -1, ncells = -1;
  std::string word;
  while (is >> word) {
    if (word == "POINTS") {
      std::string type;
      is >> npts >> type;
      for (long i = 0; i < 3 * npts; ++i) {
        double v;
        if (!(is >> v)) {
          errors.push_back("truncated POINTS block");
          return errors;
        }
      }
    } else if (word == "CELLS") {
      long size = 0;
      is >> ncells >> size;
      long read = 0;
      for (long c = 0; c < ncells; ++c) {
        long k;
        if (!(is >> k)) {
          errors.push_back("truncated CELLS block");
          return errors;
        }
        read += k + 1;
        for (long j = 0; j < k; ++j) {
          long id;
          is >> id;
          if (id < 0 || id >= npts) errors.push_back("cell " + std::to_string(c) + " references invalid point");
        }
      }
      if (read != size) errors.push_back("CELLS size field does not match the list");
    } else if (word == "CELL_TYPES") {
      long n;
      is >> n;
      if (n != ncells) errors.push_back("CELL_TYPES count differs from CELLS");
      for (long c = 0; c < n; ++c) {
        int t;
        is >> t;
        if (t != 9 && t != 23) errors.push_back("unsupported cell type " + std::to_string(t));
      }
    } else if (word == "POINT_DATA" || word == "CELL_DATA") {
      long n;
      is >> n;
      if (n != (word == "POINT_DATA" ? npts : ncells)) errors.push_back(word + " count mismatch");
      // Attribute blocks are consumed by the generic loop below.
      long count = n;
      std::string kind;
      while (is >> kind) {
        if (kind == "SCALARS" || kind == "VECTORS") {
          std::string name, type;
          is >> name >> type;
          int comps = 3;
          if (kind == "SCALARS") {
            std::getline(is, line);
            std::istringstream ls(line);
            if (!(ls >> comps)) comps = 1;
            std::string lt;
            is >> lt >> lt;  // LOOKUP_TABLE default
          }
          for (long i = 0; i < count * comps; ++i) {
            double v;
            if (!(is >> v)) {
              errors.push_back("truncated attribute " + name);
              return errors;
            }
          }
        } else if (kind == "POINT_DATA" || kind == "CELL_DATA") {
          is >> count;
          if (count != (kind == "POINT_DATA" ? npts : ncells)) errors.push_back(kind + " count mismatch");
        } else {
          errors.push_back("unexpected keyword " + kind);
          return errors;
        }
      }
    } else {
      errors.push_back("unexpected keyword " + word);
      return errors;
    }
  }
  if (npts < 0) errors.push_back("no POINTS block");
  if (ncells < 0) errors.push_back("no CELLS block");
  return errors;
}

std::vector<std::string> lint_vtk_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) return {"cannot open " + path};
  return lint_vtk(is);
}

}  // namespace phasefrac
