#include "kc/karcher.hpp"

#include "kc/meshes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace kc {

namespace {

void check_weights(const Vec& lambda, std::size_t count) {
  if (static_cast<std::size_t>(lambda.size()) != count)
    throw std::invalid_argument("weight count does not match vertex count");
  if (lambda.minCoeff() < -1e-12) throw std::invalid_argument("negative barycentric weight");
  if (std::abs(lambda.sum() - 1.0) > 1e-9) throw std::invalid_argument("weights must sum to one");
}

// The points must lie within cvr/2 of a common centre. Candidate centres:
// the points themselves and all pairwise midpoints.
void check_convexity_ball(std::span<const Point> pts) {
  const CurvatureBounds cb = curvature_bounds(pts.front().tag);
  if (!std::isfinite(cb.cvr)) return;
  const double radius = 0.5 * cb.cvr * (1 + 1e-12);
  auto covers = [&](const Point& centre) {
    for (const Point& p : pts)
      if (dist(centre, p) > radius) return false;
    return true;
  };
  for (const Point& p : pts)
    if (covers(p)) return;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (dist(pts[i], pts[j]) >= cb.inj) continue;
      Tangent half = log_map(pts[i], pts[j]);
      half.v *= 0.5;
      if (covers(exp_map(pts[i], half))) return;
    }
  throw std::invalid_argument("vertices do not fit in a common convexity ball");
}

}  // namespace

double energy(const Point& a, const Vec& lambda, std::span<const Point> pts) {
  check_weights(lambda, pts.size());
  double e = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = dist(a, pts[i]);
    e += lambda[static_cast<int>(i)] * d * d;
  }
  return e;
}

MeanReport karcher_mean(std::span<const Point> pts, const Vec& lambda, const SolverParams& params) {
  if (pts.empty()) throw std::invalid_argument("no points");
  for (const Point& p : pts)
    if (!(p.tag == pts.front().tag)) throw tag_mismatch("mean of points on different manifolds");
  check_weights(lambda, pts.size());
  check_convexity_ball(pts);

  int seed = 0;
  lambda.maxCoeff(&seed);
  Point a = pts[static_cast<std::size_t>(seed)];
  for (int it = 0; it <= params.max_iter; ++it) {
    Vec g = Vec::Zero(a.x.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double w = lambda[static_cast<int>(i)];
      if (w != 0) g += w * log_map(a, pts[i]).v;
    }
    Tangent step = make_tangent(a, std::move(g));
    const double res = norm(step);
    if (res <= params.tol) return MeanReport{std::move(a), it, res};
    a = exp_map(a, step);
  }
  throw solver_error("centre-of-mass iteration did not converge");
}

BarycentricMap::BarycentricMap(std::vector<Point> vertices, SolverParams params)
    : vertices_(std::move(vertices)), params_(params) {
  if (vertices_.empty()) throw std::invalid_argument("map needs at least one vertex");
  for (const Point& p : vertices_)
    if (!(p.tag == vertices_.front().tag)) throw tag_mismatch("map vertices on different manifolds");
  check_convexity_ball(vertices_);
  const int n = order();
  Mat l = Mat::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      l(i, j) = l(j, i) = dist(vertices_[i], vertices_[j]);
      mesh_size_ = std::max(mesh_size_, l(i, j));
    }
  edge_form_ = metric_form(EdgeLengths{std::move(l)});
}

Point BarycentricMap::operator()(const Vec& lambda) const { return solve(lambda).point; }

MeanReport BarycentricMap::solve(const Vec& lambda) const {
  return karcher_mean(vertices_, lambda, params_);
}

double BarycentricMap::flat_inner(const Vec& v, const Vec& w) const { return v.dot(edge_form_ * w); }

double BarycentricMap::flat_norm(const Vec& v) const {
  return std::sqrt(std::max(0.0, flat_inner(v, v)));
}

namespace {

Vec probe_point(const Vec& lambda, const Vec& v, double t) {
  Vec mu = lambda + t * v;
  if (mu.minCoeff() < -1e-12) throw std::invalid_argument("probe leaves the simplex");
  mu = mu.cwiseMax(0.0);
  mu /= mu.sum();
  return mu;
}

}  // namespace

Tangent map_differential(const BarycentricMap& map, const Vec& lambda, const Vec& v, double eps) {
  const Point centre = map(lambda);
  const Point plus = map(probe_point(lambda, v, eps));
  const Point minus = map(probe_point(lambda, v, -eps));
  Vec d = (log_map(centre, plus).v - log_map(centre, minus).v) / (2 * eps);
  return make_tangent(centre, std::move(d));
}

double pullback_metric(const BarycentricMap& map, const Vec& lambda, const Vec& v, const Vec& w, double eps) {
  if ((v - w).norm() < 1e-15) {
    Tangent dv = map_differential(map, lambda, v, eps);
    return inner(dv, dv);
  }
  Tangent dv = map_differential(map, lambda, v, eps);
  Tangent dw = map_differential(map, lambda, w, eps);
  return inner(dv, dw);
}

double connection_defect(const BarycentricMap& map, const Vec& lambda, const Vec& v, double eps) {
  const Point centre = map(lambda);
  const Point plus = map(probe_point(lambda, v, eps));
  const Point minus = map(probe_point(lambda, v, -eps));
  Tangent second = make_tangent(centre, log_map(centre, plus).v + log_map(centre, minus).v);
  return norm(second) / (eps * eps);
}

DistortionSample measure_distortion(const BarycentricMap& map, const Vec& lambda, double eps) {
  const int n = map.order();
  std::vector<Vec> probes;
  for (int i = 0; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      Vec v = Vec::Zero(n + 1);
      v[i] = 1;
      v[j] = -1;
      probes.push_back(v / v.norm());
    }
  if (n >= 2) {
    Vec v = Vec::Zero(n + 1);
    v[0] = 2;
    v[1] = -1;
    v[2] = -1;
    probes.push_back(v / v.norm());
  }

  std::vector<Tangent> diffs;
  diffs.reserve(probes.size());
  for (const Vec& v : probes) diffs.push_back(map_differential(map, lambda, v, eps));

  DistortionSample out;
  for (std::size_t a = 0; a < probes.size(); ++a)
    for (std::size_t b = a; b < probes.size(); ++b) {
      const double pulled = inner(diffs[a], diffs[b]);
      const double flat = map.flat_inner(probes[a], probes[b]);
      const double na = map.flat_norm(probes[a]);
      const double nb = map.flat_norm(probes[b]);
      if (na > 0 && nb > 0)
        out.metric_defect = std::max(out.metric_defect, std::abs(pulled - flat) / (na * nb));
    }
  for (const Vec& v : probes) {
    const double nv = map.flat_norm(v);
    if (nv > 0)
      out.connection_defect =
          std::max(out.connection_defect, connection_defect(map, lambda, v, eps) / (nv * nv));
  }
  return out;
}

double pullback_definiteness(const BarycentricMap& map, const Vec& lambda, double eps) {
  const int n = map.order();
  std::vector<Tangent> diffs;
  Mat pulled(n, n), flat(n, n);
  std::vector<Vec> basis;
  for (int i = 1; i <= n; ++i) {
    Vec v = Vec::Zero(n + 1);
    v[0] = -1;
    v[i] = 1;
    basis.push_back(v);
    diffs.push_back(map_differential(map, lambda, v, eps));
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      pulled(i, j) = inner(diffs[i], diffs[j]);
      flat(i, j) = map.flat_inner(basis[i], basis[j]);
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(pulled, flat);
  return es.eigenvalues().minCoeff();
}

double interpolate_scalar(const Vec& lambda, const Vec& vertex_values) {
  if (lambda.size() != vertex_values.size()) throw std::invalid_argument("interpolation size mismatch");
  return lambda.dot(vertex_values);
}

Point interpolate_map(const BarycentricMap& image_map, const Vec& lambda) { return image_map(lambda); }

namespace {

struct SampleMesh {
  std::vector<Point> samples;
  std::vector<std::array<int, 3>> triangles;
};

SampleMesh sample_mesh(const ManifoldTag& tag, const std::vector<Point>& pts, int resolution) {
  SampleMesh out;
  if (tag.kind == ManifoldKind::sphere && tag.dim == 2) {
    TriMesh ms = icosphere(resolution);
    out.samples.reserve(ms.positions.rows());
    for (int i = 0; i < ms.positions.rows(); ++i)
      out.samples.push_back(make_point(tag, ms.positions.row(i).transpose()));
    for (const auto& t : ms.triangles) out.triangles.push_back({t[0], t[1], t[2]});
  } else if (tag.kind == ManifoldKind::flat_torus && tag.dim == 2) {
    const int k = 8 << resolution;
    auto id = [&](int i, int j) { return (i % k + k) % k * k + (j % k + k) % k; };
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        Vec x(2);
        x << (i + 0.0) / k, (j + 0.0) / k;
        out.samples.push_back(make_point(tag, x));
      }
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        out.triangles.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
        out.triangles.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
      }
  } else if (tag.kind == ManifoldKind::hyperbolic && tag.dim == 2) {
    // Polar grid on a geodesic disk around the first vertex, radius covering
    // the point set with margin.
    double radius = 0.5;
    for (const Point& p : pts) radius = std::max(radius, dist(pts.front(), p) * 1.5 + 0.5);
    const int rings = 16 << resolution, sectors = 32 << resolution;
    const Point& o = pts.front();
    Vec e1 = Vec::Zero(3), e2 = Vec::Zero(3);
    e1[1] = 1;
    e2[2] = 1;
    out.samples.push_back(o);
    for (int r = 1; r <= rings; ++r)
      for (int s = 0; s < sectors; ++s) {
        const double rho = radius * r / rings, phi = 2 * M_PI * s / sectors;
        Tangent t = make_tangent(o, rho * (std::cos(phi) * e1 + std::sin(phi) * e2));
        out.samples.push_back(exp_map(o, t));
      }
    auto id = [&](int r, int s) { return r == 0 ? 0 : 1 + (r - 1) * sectors + (s % sectors + sectors) % sectors; };
    for (int s = 0; s < sectors; ++s) out.triangles.push_back({id(0, 0), id(1, s), id(1, s + 1)});
    for (int r = 1; r < rings; ++r)
      for (int s = 0; s < sectors; ++s) {
        out.triangles.push_back({id(r, s), id(r + 1, s), id(r + 1, s + 1)});
        out.triangles.push_back({id(r, s), id(r + 1, s + 1), id(r, s + 1)});
      }
  } else {
    throw std::invalid_argument("delaunay sampling supports 2-dimensional sphere, flat torus, hyperbolic disk");
  }
  return out;
}

}  // namespace

DelaunayResult delaunay(const ManifoldTag& tag, const std::vector<Point>& pts, int resolution) {
  if (tag.dim != 2) throw std::invalid_argument("delaunay requires a 2-manifold");
  if (pts.size() < 2) throw std::invalid_argument("delaunay needs at least two vertices");
  for (const Point& p : pts)
    if (!(p.tag == tag)) throw tag_mismatch("vertex on wrong manifold");

  const SampleMesh mesh = sample_mesh(tag, pts, resolution);

  // Nearest-vertex labeling; ties resolve to the lowest vertex id.
  std::vector<int> label(mesh.samples.size());
  for (std::size_t s = 0; s < mesh.samples.size(); ++s) {
    int best = 0;
    double best_d = dist(mesh.samples[s], pts[0]);
    for (std::size_t v = 1; v < pts.size(); ++v) {
      const double d = dist(mesh.samples[s], pts[v]);
      if (d < best_d - 1e-14) {
        best_d = d;
        best = static_cast<int>(v);
      }
    }
    label[s] = best;
  }

  // One-ring label sets detect bisectors of more than three vertices.
  std::vector<std::set<int>> ring(mesh.samples.size());
  for (std::size_t s = 0; s < mesh.samples.size(); ++s) ring[s].insert(label[s]);
  for (const auto& t : mesh.triangles)
    for (int a : t)
      for (int b : t) ring[a].insert(label[b]);
  for (const auto& r : ring)
    if (r.size() > 3) throw non_generic("bisector of more than three vertices detected");

  std::set<std::array<int, 3>> triangles;
  for (const auto& t : mesh.triangles) {
    std::set<int> labs{label[t[0]], label[t[1]], label[t[2]]};
    if (labs.size() == 3) {
      std::array<int, 3> key{};
      std::copy(labs.begin(), labs.end(), key.begin());
      triangles.insert(key);
    }
  }
  if (triangles.empty()) throw non_generic("no triple points: vertex set is not generic at this resolution");

  // Orient elements through the ambient structure.
  std::vector<VertexTuple> elements;
  for (const auto& t : triangles) {
    bool flip = false;
    if (tag.kind == ManifoldKind::sphere) {
      Mat m(3, 3);
      m.row(0) = pts[t[0]].x.transpose();
      m.row(1) = pts[t[1]].x.transpose();
      m.row(2) = pts[t[2]].x.transpose();
      flip = m.determinant() < 0;
    } else {
      const Tangent u = log_map(pts[t[0]], pts[t[1]]);
      const Tangent v = log_map(pts[t[0]], pts[t[2]]);
      if (tag.kind == ManifoldKind::flat_torus) {
        flip = (u.v[0] * v.v[1] - u.v[1] * v.v[0]) < 0;
      } else {
        flip = (u.v[1] * v.v[2] - u.v[2] * v.v[1]) < 0;  // hyperboloid chart at x0 axis
      }
    }
    elements.push_back(flip ? VertexTuple{t[0], t[2], t[1]} : VertexTuple{t[0], t[1], t[2]});
  }

  DelaunayResult out;
  try {
    out.complex = build_complex(elements);
  } catch (const irregular_complex& e) {
    throw non_generic(std::string("vertex set is not generic: ") + e.what());
  }
  const bool closed = tag.kind != ManifoldKind::hyperbolic;
  if (closed && out.complex.has_boundary())
    throw non_generic("dual complex of a closed manifold has boundary simplices");
  if (out.complex.count(0) != pts.size())
    throw non_generic("some vertex has no Voronoi triple point at this resolution");

  out.metric = metric_from(out.complex, [&](int a, int b) { return dist(pts[a], pts[b]); });
  out.points = pts;
  return out;
}

}  // namespace kc
