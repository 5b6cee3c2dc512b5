#include "kc/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace kc {

MeshFile read_mesh(std::istream& in) {
  MeshFile f;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string rec;
    if (!(ls >> rec)) continue;
    auto fail = [&](const std::string& why) {
      throw std::invalid_argument("mesh line " + std::to_string(lineno) + ": " + why);
    };
    if (rec == "manifold") {
      // The integer is the coordinate count of the p-records (ambient
      // dimension), so `manifold sphere 3` tags the unit 2-sphere in R^3.
      std::string kind_name;
      int ambient = 0;
      if (!(ls >> kind_name >> ambient) || ambient < 1) fail("expected 'manifold <kind> <ambient_dim>'");
      const ManifoldKind kind = manifold_kind_from_string(kind_name);
      const bool embedded = kind == ManifoldKind::sphere || kind == ManifoldKind::hyperbolic;
      const int m = embedded ? ambient - 1 : ambient;
      if (m < 1) fail("ambient dimension too small for the manifold kind");
      f.tag = ManifoldTag{kind, m};
    } else if (rec == "v") {
      int id;
      if (!(ls >> id)) fail("expected 'v <id>'");
      f.declared_vertices.push_back(id);
    } else if (rec == "p") {
      int id;
      if (!(ls >> id)) fail("expected 'p <id> <coords...>'");
      std::vector<double> xs;
      double x;
      while (ls >> x) xs.push_back(x);
      if (xs.empty()) fail("point without coordinates");
      Vec v(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) v[i] = xs[i];
      f.points.emplace_back(id, std::move(v));
    } else if (rec == "s") {
      VertexTuple t;
      int id;
      while (ls >> id) t.push_back(id);
      if (t.size() < 2) fail("element needs at least two vertices");
      f.elements.push_back(std::move(t));
    } else if (rec == "l") {
      int i, j;
      double len;
      if (!(ls >> i >> j >> len) || len <= 0) fail("expected 'l <i> <j> <length>' with positive length");
      f.lengths.emplace_back(i, j, len);
    } else {
      fail("unknown record '" + rec + "'");
    }
  }
  return f;
}

MeshFile read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open mesh file: " + path);
  return read_mesh(in);
}

LoadedMesh assemble_mesh(const MeshFile& file) {
  LoadedMesh out;
  out.complex = build_complex(file.elements);
  out.tag = file.tag;

  std::map<int, Point> point_by_id;
  if (!file.points.empty()) {
    if (!file.tag) throw std::invalid_argument("p-records require a manifold header");
    for (const auto& [id, coords] : file.points) point_by_id.emplace(id, make_point(*file.tag, coords));
    out.points.reserve(out.complex.count(0));
    for (const auto& v : out.complex.faces[0]) {
      auto it = point_by_id.find(v[0]);
      if (it == point_by_id.end()) throw std::invalid_argument("vertex without coordinates: " + std::to_string(v[0]));
      out.points.push_back(it->second);
    }
  }

  std::map<std::pair<int, int>, double> given;
  for (const auto& [i, j, len] : file.lengths) given[{std::min(i, j), std::max(i, j)}] = len;

  out.metric.edge_length.reserve(out.complex.count(1));
  for (const auto& e : out.complex.faces[1]) {
    auto it = given.find({e[0], e[1]});
    if (it != given.end()) {
      out.metric.edge_length.push_back(it->second);
    } else if (!point_by_id.empty()) {
      out.metric.edge_length.push_back(dist(point_by_id.at(e[0]), point_by_id.at(e[1])));
    } else {
      throw std::invalid_argument("edge without length: " + std::to_string(e[0]) + "-" + std::to_string(e[1]));
    }
  }
  for (int id : file.declared_vertices)
    if (out.complex.simplex_index(0, {id}) < 0)
      throw irregular_complex("declared vertex is isolated: " + std::to_string(id));
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string key_of(const VertexTuple& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(t[i]);
  }
  return s;
}

}  // namespace

void write_mesh(std::ostream& out, const Complex& c, const DiscreteMetric& m) {
  for (const auto& v : c.faces[0]) out << "v " << v[0] << "\n";
  for (std::size_t e = 0; e < c.count(c.dim); ++e) {
    out << "s";
    for (int v : c.faces[c.dim][e]) out << ' ' << v;
    out << "\n";
  }
  for (std::size_t i = 0; i < c.count(1); ++i)
    out << "l " << c.faces[1][i][0] << ' ' << c.faces[1][i][1] << ' ' << fmt(m.edge_length[i]) << "\n";
}

void write_cochain_csv(std::ostream& out, const Complex& c, int degree, const Vec& coefficients) {
  out << "degree,simplex_key,coefficient\n";
  for (std::size_t i = 0; i < c.count(degree); ++i)
    out << degree << ',' << key_of(c.faces[degree][i]) << ',' << fmt(coefficients[static_cast<int>(i)]) << "\n";
}

void write_vertex_csv(std::ostream& out, const Mat& values) {
  out << "vertex_id";
  for (int j = 0; j < values.cols(); ++j) out << ",value" << j;
  out << "\n";
  for (int i = 0; i < values.rows(); ++i) {
    out << i;
    for (int j = 0; j < values.cols(); ++j) out << ',' << fmt(values(i, j));
    out << "\n";
  }
}

void write_sparse_coo(std::ostream& out, const SpMat& m) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << fmt(it.value()) << "\n";
}

}  // namespace kc
