#include <filesystem>
#include <fstream>
#include <sstream>

#include "sgns/io.hpp"

namespace sgns {

Vector pressure_to_nodes(const Mesh& mesh, const Vector& p) {
  if (p.size() != mesh.n_p()) throw std::invalid_argument("pressure_to_nodes: size mismatch");
  Vector out = Vector::Zero(mesh.num_velocity_nodes());
  const double lin[3][2] = {{1.0, 0.0}, {0.5, 0.5}, {0.0, 1.0}};
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& c = mesh.elements[e];
    const auto& pc = mesh.pressure_elements[e];
    for (int b = 0; b < 3; ++b)
      for (int a = 0; a < 3; ++a) {
        double v = 0.0;
        for (int bb = 0; bb < 2; ++bb)
          for (int aa = 0; aa < 2; ++aa) v += lin[a][aa] * lin[b][bb] * p[pc[2 * bb + aa]];
        out[c[3 * b + a]] = v;  // shared nodes get identical values from every element
      }
  }
  return out;
}

namespace {

std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.precision(17);
  return f;
}

void check_fields(const Mesh& mesh, const std::vector<NamedField>& fields) {
  for (const auto& [name, v] : fields)
    if (v.size() != mesh.num_velocity_nodes())
      throw std::invalid_argument("field '" + name + "' has " + std::to_string(v.size()) + " values, expected " +
                                  std::to_string(mesh.num_velocity_nodes()));
}

}  // namespace

void write_vtk(const std::string& path, const Mesh& mesh, const std::vector<NamedField>& fields) {
  check_fields(mesh, fields);
  auto f = open_out(path);
  const int nv = mesh.num_velocity_nodes(), ne = mesh.num_elements();
  f << "# vtk DataFile Version 3.0\nsgns\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  f << "POINTS " << nv << " double\n";
  for (const auto& p : mesh.nodes) f << p.x << ' ' << p.y << " 0\n";
  f << "CELLS " << ne << ' ' << ne * 10 << '\n';
  static constexpr int order[9] = {0, 2, 8, 6, 1, 5, 7, 3, 4};
  for (const auto& c : mesh.elements) {
    f << 9;
    for (int k : order) f << ' ' << c[k];
    f << '\n';
  }
  f << "CELL_TYPES " << ne << '\n';
  for (int e = 0; e < ne; ++e) f << "28\n";
  if (!fields.empty()) f << "POINT_DATA " << nv << '\n';
  for (const auto& [name, v] : fields) {
    f << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < nv; ++i) f << v[i] << '\n';
  }
  if (!f) throw IoError("write to '" + path + "' failed");
}

void write_nodal_csv(const std::string& path, const Mesh& mesh, const std::vector<NamedField>& fields) {
  check_fields(mesh, fields);
  auto f = open_out(path);
  f << "x,y";
  for (const auto& fld : fields) f << ',' << fld.first;
  f << '\n';
  for (int i = 0; i < mesh.num_velocity_nodes(); ++i) {
    f << mesh.nodes[i].x << ',' << mesh.nodes[i].y;
    for (const auto& fld : fields) f << ',' << fld.second[i];
    f << '\n';
  }
  if (!f) throw IoError("write to '" + path + "' failed");
}

void write_triple_products(const std::string& dir, const TripleProductTensor& h) {
  for (int l = 0; l < h.M_nu; ++l) {
    auto f = open_out((std::filesystem::path(dir) / ("H_" + std::to_string(l) + ".txt")).string());
    const auto& m = h.H[l];
    for (int j = 0; j < m.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(m, j); it; ++it) f << j << ' ' << it.col() << ' ' << it.value() << '\n';
    if (!f) throw IoError("write to '" + dir + "' failed");
  }
}

void write_text(const std::string& path, const std::string& text) {
  auto f = open_out(path);
  f << text;
  if (!f) throw IoError("write to '" + path + "' failed");
}

std::string read_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace sgns
