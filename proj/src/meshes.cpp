#include "kc/meshes.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace kc {

TriMesh icosahedron() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double s = 1.0 / std::sqrt(1.0 + phi * phi);
  TriMesh m;
  m.positions.resize(12, 3);
  int r = 0;
  for (double a : {-1.0, 1.0})
    for (double b : {-phi, phi}) {
      m.positions.row(r++) << a * s, b * s, 0;
      m.positions.row(r++) << 0, a * s, b * s;
      m.positions.row(r++) << b * s, 0, a * s;
    }
  // Faces found by adjacency: any three mutually nearest vertices.
  const double edge = 2.0 * s;
  for (int i = 0; i < 12; ++i)
    for (int j = i + 1; j < 12; ++j)
      for (int k = j + 1; k < 12; ++k) {
        auto close = [&](int a, int b) {
          return std::abs((m.positions.row(a) - m.positions.row(b)).norm() - edge) < 1e-9;
        };
        if (close(i, j) && close(j, k) && close(i, k)) {
          Eigen::Matrix3d t;
          t.row(0) = m.positions.row(i);
          t.row(1) = m.positions.row(j);
          t.row(2) = m.positions.row(k);
          if (t.determinant() > 0)
            m.triangles.push_back({i, j, k});
          else
            m.triangles.push_back({i, k, j});
        }
      }
  return m;
}

TriMesh icosphere(int depth) {
  TriMesh m = icosahedron();
  for (int d = 0; d < depth; ++d) {
    std::map<std::pair<int, int>, int> midpoint;
    std::vector<Eigen::RowVector3d> pts;
    pts.reserve(m.positions.rows());
    for (int i = 0; i < m.positions.rows(); ++i) pts.push_back(m.positions.row(i));
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Eigen::RowVector3d p = (pts[a] + pts[b]).normalized();
      pts.push_back(p);
      const int id = static_cast<int>(pts.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> tris;
    tris.reserve(m.triangles.size() * 4);
    for (const auto& t : m.triangles) {
      const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      tris.push_back({t[0], ab, ca});
      tris.push_back({t[1], bc, ab});
      tris.push_back({t[2], ca, bc});
      tris.push_back({ab, bc, ca});
    }
    m.positions.resize(static_cast<int>(pts.size()), 3);
    for (std::size_t i = 0; i < pts.size(); ++i) m.positions.row(static_cast<int>(i)) = pts[i];
    m.triangles = std::move(tris);
  }
  return m;
}

DiscreteMetric ManifoldMesh::geodesic_metric() const {
  return metric_from(complex, [&](int a, int b) { return dist(points[a], points[b]); });
}

ManifoldMesh icosphere_mesh(int depth, ManifoldKind ambient) {
  TriMesh tm = icosphere(depth);
  ManifoldMesh m;
  std::vector<VertexTuple> elements;
  elements.reserve(tm.triangles.size());
  for (const auto& t : tm.triangles) elements.push_back({t[0], t[1], t[2]});
  m.complex = build_complex(elements);
  const ManifoldTag tag = ambient == ManifoldKind::sphere ? ManifoldTag::sphere(2) : ManifoldTag::euclidean(3);
  m.points.reserve(tm.positions.rows());
  for (int i = 0; i < tm.positions.rows(); ++i) m.points.push_back(make_point(tag, tm.positions.row(i).transpose()));
  return m;
}

namespace {

PlanarMesh planar_from_positions(Mat positions, std::vector<VertexTuple> elements) {
  PlanarMesh m;
  m.complex = build_complex(elements);
  m.positions = std::move(positions);
  m.metric = metric_from(m.complex, [&](int a, int b) { return (m.positions.row(a) - m.positions.row(b)).norm(); });
  std::vector<char> on_boundary(m.complex.vertex_count, 0);
  for (std::size_t f = 0; f < m.complex.count(1); ++f)
    if (m.complex.dim == 2 && m.complex.facet_on_boundary[f])
      for (int v : m.complex.faces[1][f]) on_boundary[v] = 1;
  for (int v = 0; v < m.complex.vertex_count; ++v)
    if (on_boundary[v]) m.boundary_vertices.push_back(v);
  return m;
}

}  // namespace

PlanarMesh unit_square_mesh(int k) {
  Mat pos((k + 1) * (k + 1), 2);
  auto id = [&](int i, int j) { return i * (k + 1) + j; };
  for (int i = 0; i <= k; ++i)
    for (int j = 0; j <= k; ++j) pos.row(id(i, j)) << double(i) / k, double(j) / k;
  std::vector<VertexTuple> elems;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      elems.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
      elems.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return planar_from_positions(std::move(pos), std::move(elems));
}

PlanarMesh equilateral_patch(int cols, int rows) {
  Mat pos((cols + 1) * (rows + 1), 2);
  auto id = [&](int i, int j) { return j * (cols + 1) + i; };
  const double h = std::sqrt(3.0) / 2.0;
  for (int j = 0; j <= rows; ++j)
    for (int i = 0; i <= cols; ++i) pos.row(id(i, j)) << i + 0.5 * j, h * j;
  std::vector<VertexTuple> elems;
  for (int j = 0; j < rows; ++j)
    for (int i = 0; i < cols; ++i) {
      elems.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
      elems.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return planar_from_positions(std::move(pos), std::move(elems));
}

PlanarMesh jittered_well_centred_mesh(int cols, int rows, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jit(-amplitude, amplitude);
  for (int attempt = 0; attempt < 64; ++attempt) {
    PlanarMesh base = equilateral_patch(cols, rows);
    std::vector<char> boundary(base.complex.vertex_count, 0);
    for (int v : base.boundary_vertices) boundary[v] = 1;
    Mat pos = base.positions;
    for (int v = 0; v < pos.rows(); ++v)
      if (!boundary[v]) {
        pos(v, 0) += jit(rng);
        pos(v, 1) += jit(rng);
      }
    std::vector<VertexTuple> elems(base.complex.faces[2].begin(), base.complex.faces[2].end());
    PlanarMesh jittered = planar_from_positions(std::move(pos), std::move(elems));
    try {
      Subdivision sub = subdivide(jittered.complex, jittered.metric);
      dual_volumes(jittered.complex, sub, jittered.metric);
      return jittered;
    } catch (const not_well_centred&) {
      // try a fresh jitter
    }
  }
  throw solver_error("could not generate a well-centred jittered mesh");
}

TorusMesh equilateral_torus_mesh(int k) {
  if (k < 3) throw std::invalid_argument("torus grid needs k >= 3");
  auto id = [&](int i, int j) { return ((i % k + k) % k) * k + ((j % k + k) % k); };
  std::vector<VertexTuple> elems;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      elems.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
      elems.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  TorusMesh m;
  m.complex = build_complex(elems);
  m.metric = uniform_metric(m.complex, 1.0 / k);
  return m;
}

std::vector<Point> polar_triangle(double r) {
  const ManifoldTag tag = ManifoldTag::sphere(2);
  const Point pole = make_point(tag, (Vec(3) << 0, 0, 1).finished());
  std::vector<Point> pts;
  for (int i = 0; i < 3; ++i) {
    const double phi = 2 * std::numbers::pi * i / 3;
    Vec dir(3);
    dir << std::cos(phi), std::sin(phi), 0;
    pts.push_back(exp_map(pole, make_tangent(pole, r * dir)));
  }
  return pts;
}

}  // namespace kc
