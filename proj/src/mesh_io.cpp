#include "phasefrac/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace phasefrac {

namespace {

class LineReader {
public:
  explicit LineReader(std::istream& is) : is_(is) {}

  // Next non-empty, non-comment line split into a stream.
  std::istringstream next(const char* what) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(line);
    }
    fail(std::string("unexpected end of file, expected ") + what);
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw MeshError("mesh file line " + std::to_string(line_no_) + ": " + msg);
  }

private:
  std::istream& is_;
  int line_no_ = 0;
};

template <class T>
T expect(std::istringstream& ls, LineReader& r, const char* what) {
  T value{};
  if (!(ls >> value)) r.fail(std::string("cannot parse ") + what);
  return value;
}

void expect_keyword(std::istringstream& ls, LineReader& r, const std::string& keyword) {
  std::string word;
  if (!(ls >> word) || word != keyword) r.fail("expected keyword '" + keyword + "'");
}

void write_sets(std::ostream& os, const char* keyword,
                const std::map<std::string, std::vector<int>>& sets) {
  os << keyword << ' ' << sets.size() << '\n';
  for (const auto& [name, ids] : sets) {
    os << name << ' ' << ids.size();
    for (int id : ids) os << ' ' << id;
    os << '\n';
  }
}

void read_sets(LineReader& r, const char* keyword, std::map<std::string, std::vector<int>>& sets) {
  auto header = r.next(keyword);
  expect_keyword(header, r, keyword);
  const auto count = expect<std::size_t>(header, r, "set count");
  for (std::size_t s = 0; s < count; ++s) {
    auto ls = r.next("set");
    const auto name = expect<std::string>(ls, r, "set name");
    const auto n = expect<std::size_t>(ls, r, "set size");
    std::vector<int> ids(n);
    for (auto& id : ids) id = expect<int>(ls, r, "set member");
    sets[name] = std::move(ids);
  }
}

}  // namespace

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "phasefrac-mesh 1\n";
  os << "order " << mesh.order << '\n';
  os << "thickness " << mesh.thickness << '\n';
  os << "nodes " << mesh.num_nodes() << '\n';
  for (const auto& p : mesh.nodes) os << p.x << ' ' << p.y << '\n';
  os << "elements " << mesh.num_elements() << '\n';
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto conn = mesh.element(e);
    for (std::size_t a = 0; a < conn.size(); ++a) os << (a ? " " : "") << conn[a];
    os << '\n';
  }
  write_sets(os, "node_sets", mesh.node_sets);
  write_sets(os, "element_sets", mesh.element_sets);
}

Mesh read_mesh(std::istream& is) {
  LineReader r(is);
  Mesh mesh;
  auto magic = r.next("header");
  expect_keyword(magic, r, "phasefrac-mesh");
  if (expect<int>(magic, r, "version") != 1) r.fail("unsupported mesh version");

  auto ord = r.next("order");
  expect_keyword(ord, r, "order");
  mesh.order = expect<int>(ord, r, "order");
  if (mesh.order != 1 && mesh.order != 2) r.fail("order must be 1 or 2");

  auto th = r.next("thickness");
  expect_keyword(th, r, "thickness");
  mesh.thickness = expect<double>(th, r, "thickness");

  auto nh = r.next("nodes");
  expect_keyword(nh, r, "nodes");
  const auto nn = expect<std::size_t>(nh, r, "node count");
  mesh.nodes.resize(nn);
  for (auto& p : mesh.nodes) {
    auto ls = r.next("node coordinates");
    p.x = expect<double>(ls, r, "x");
    p.y = expect<double>(ls, r, "y");
  }

  auto eh = r.next("elements");
  expect_keyword(eh, r, "elements");
  const auto ne = expect<std::size_t>(eh, r, "element count");
  const int npe = mesh.nodes_per_element();
  mesh.connectivity.reserve(ne * npe);
  for (std::size_t e = 0; e < ne; ++e) {
    auto ls = r.next("connectivity");
    for (int a = 0; a < npe; ++a) mesh.connectivity.push_back(expect<int>(ls, r, "node index"));
  }
  read_sets(r, "node_sets", mesh.node_sets);
  read_sets(r, "element_sets", mesh.element_sets);
  mesh.validate();
  return mesh;
}

void write_mesh_file(const std::string& path, const Mesh& mesh) {
  std::ofstream os(path);
  if (!os) throw MeshError("cannot open " + path + " for writing");
  write_mesh(os, mesh);
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw MeshError("cannot open " + path);
  return read_mesh(is);
}

}  // namespace phasefrac
