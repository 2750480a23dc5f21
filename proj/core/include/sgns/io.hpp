#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sgns/gpc.hpp"
#include "sgns/mesh.hpp"
#include "sgns/sparse.hpp"

namespace sgns {

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Named scalar field with one value per velocity node.
using NamedField = std::pair<std::string, Vector>;

/// Q1 pressure prolonged to every velocity node (bilinear interpolation inside each element).
Vector pressure_to_nodes(const Mesh& mesh, const Vector& p);

/// VTK legacy ASCII unstructured grid of biquadratic quads with point data.
void write_vtk(const std::string& path, const Mesh& mesh, const std::vector<NamedField>& fields);
/// CSV with columns x, y and one column per field.
void write_nodal_csv(const std::string& path, const Mesh& mesh, const std::vector<NamedField>& fields);
/// One coordinate-list file "H_<l>.txt" per matrix (lines "j k value") in dir.
void write_triple_products(const std::string& dir, const TripleProductTensor& h);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace sgns
