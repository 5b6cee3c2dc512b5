#pragma once

#include "kc/complex.hpp"
#include "kc/manifold.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace kc {

// Parsed mesh file. Records, one per line:
//   # comment
//   manifold <kind> <m>
//   v <id>
//   p <id> <coords...>
//   s <id...>
//   l <i> <j> <length>
struct MeshFile {
  std::optional<ManifoldTag> tag;
  std::vector<int> declared_vertices;
  std::vector<std::pair<int, Vec>> points;
  std::vector<VertexTuple> elements;
  std::vector<std::tuple<int, int, double>> lengths;
};

MeshFile read_mesh(std::istream& in);
MeshFile read_mesh_file(const std::string& path);

struct LoadedMesh {
  Complex complex;
  DiscreteMetric metric;
  std::optional<ManifoldTag> tag;
  std::vector<Point> points;  // empty unless p-records present
};

// Builds the complex and the metric. Explicit l-records win; otherwise the
// lengths are derived from the p-records through the tagged manifold's
// distance.
LoadedMesh assemble_mesh(const MeshFile& file);

void write_mesh(std::ostream& out, const Complex& c, const DiscreteMetric& m);

// CSV dump (degree, simplex_key, coefficient), key as "a-b-c".
void write_cochain_csv(std::ostream& out, const Complex& c, int degree, const Vec& coefficients);

// CSV dump (vertex_id, value...).
void write_vertex_csv(std::ostream& out, const Mat& values);

// Coordinate-list text dump (row, col, value).
void write_sparse_coo(std::ostream& out, const SpMat& m);

}  // namespace kc
