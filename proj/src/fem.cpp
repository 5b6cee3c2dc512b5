#include "kc/fem.hpp"

#include "kc/quadrature.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>

namespace kc {

namespace {

// Pulled-back element metric at a barycentric node: matrix of inner products
// of the map differentials along the basis directions e_i - e_0, i = 1..n.
Mat pullback_gram(const BarycentricMap& map, const Vec& node, double probe_eps) {
  const int n = map.order();
  std::vector<Tangent> diffs;
  diffs.reserve(n);
  for (int i = 1; i <= n; ++i) {
    Vec v = Vec::Zero(n + 1);
    v[0] = -1;
    v[i] = 1;
    diffs.push_back(map_differential(map, node, v, probe_eps));
  }
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) g(i, j) = g(j, i) = inner(diffs[i], diffs[j]);
  return g;
}

// Scatters element blocks built from per-node Gram matrices. The quadrature
// weights sum to 1/n!, so the flat case reproduces |e| Q exactly.
void accumulate_element(std::vector<Triplet>& kt, std::vector<Triplet>& mt, const VertexTuple& verts,
                        const std::vector<Mat>& grams, const SimplexQuadrature& quad) {
  const int n = static_cast<int>(verts.size()) - 1;
  Mat ke = Mat::Zero(n + 1, n + 1);
  Mat me = Mat::Zero(n + 1, n + 1);
  // dlambda^i in the coordinates of the unit simplex (t_1..t_n).
  Mat dl(n + 1, n);
  dl.row(0) = -Vec::Ones(n).transpose();
  dl.bottomRows(n) = Mat::Identity(n, n);
  for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
    const Mat& g = grams[q];
    const double density = std::sqrt(std::max(0.0, g.determinant()));
    const Mat ginv = g.inverse();
    ke += quad.weights[q] * density * (dl * ginv * dl.transpose());
    me += quad.weights[q] * density * (quad.nodes[q] * quad.nodes[q].transpose());
  }
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b) {
      kt.emplace_back(verts[a], verts[b], ke(a, b));
      mt.emplace_back(verts[a], verts[b], me(a, b));
    }
}

}  // namespace

P1System assemble(const Complex& c, const DiscreteMetric& m) {
  const int n = c.dim;
  P1System sys;
  sys.vertex_count = c.vertex_count;
  std::vector<Triplet> kt, mt;
  for (std::size_t e = 0; e < c.count(n); ++e) {
    EdgeLengths el = simplex_lengths(c, m, n, static_cast<int>(e));
    if (is_degenerate(el)) throw degenerate_simplex("degenerate element in assembly");
    const double vol = volume(el);
    const Mat q = circumdata(el).cotangent;
    const VertexTuple& verts = c.faces[n][e];
    for (int a = 0; a <= n; ++a)
      for (int b = 0; b <= n; ++b) {
        kt.emplace_back(verts[a], verts[b], vol * q(a, b));
        const double mass = vol * (a == b ? 2.0 : 1.0) / ((n + 1.0) * (n + 2.0));
        mt.emplace_back(verts[a], verts[b], mass);
      }
  }
  sys.stiffness.resize(c.vertex_count, c.vertex_count);
  sys.mass.resize(c.vertex_count, c.vertex_count);
  sys.stiffness.setFromTriplets(kt.begin(), kt.end());
  sys.mass.setFromTriplets(mt.begin(), mt.end());
  return sys;
}

P1System assemble_pullback(const ManifoldMesh& mesh, const SolverParams& params, int quad_degree,
                           double probe_eps) {
  const Complex& c = mesh.complex;
  const int n = c.dim;
  const SimplexQuadrature quad = simplex_quadrature(n, quad_degree);
  P1System sys;
  sys.source = MetricSource::pullback_quadrature;
  sys.vertex_count = c.vertex_count;
  std::vector<Triplet> kt, mt;
  for (std::size_t e = 0; e < c.count(n); ++e) {
    const VertexTuple& verts = c.faces[n][e];
    std::vector<Point> corner;
    corner.reserve(n + 1);
    for (int v : verts) corner.push_back(mesh.points[v]);
    BarycentricMap map(std::move(corner), params);
    std::vector<Mat> grams;
    grams.reserve(quad.nodes.size());
    for (const Vec& node : quad.nodes) grams.push_back(pullback_gram(map, node, probe_eps));
    accumulate_element(kt, mt, verts, grams, quad);
  }
  sys.stiffness.resize(c.vertex_count, c.vertex_count);
  sys.mass.resize(c.vertex_count, c.vertex_count);
  sys.stiffness.setFromTriplets(kt.begin(), kt.end());
  sys.mass.setFromTriplets(mt.begin(), mt.end());
  return sys;
}

namespace {

Vec solve_reduced(const SpMat& k_mat, const Vec& load, const PoissonBC& bc, int nv) {
  std::vector<char> fixed(nv, 0);
  Vec full = Vec::Zero(nv);
  for (std::size_t i = 0; i < bc.vertices.size(); ++i) {
    fixed[bc.vertices[i]] = 1;
    full[bc.vertices[i]] = bc.values[static_cast<int>(i)];
  }
  std::vector<int> place(nv, -1), free_ids;
  for (int v = 0; v < nv; ++v)
    if (!fixed[v]) {
      place[v] = static_cast<int>(free_ids.size());
      free_ids.push_back(v);
    }
  const int nf = static_cast<int>(free_ids.size());
  Vec rhs = Vec::Zero(nf);
  for (int v : free_ids) rhs[place[v]] = load[v];
  std::vector<Triplet> trips;
  for (int col = 0; col < k_mat.outerSize(); ++col)
    for (SpMat::InnerIterator it(k_mat, col); it; ++it) {
      const int r = static_cast<int>(it.row()), cc = static_cast<int>(it.col());
      if (fixed[r]) continue;
      if (fixed[cc])
        rhs[place[r]] -= it.value() * full[cc];
      else
        trips.emplace_back(place[r], place[cc], it.value());
    }
  SpMat kf(nf, nf);
  kf.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<SpMat> solver(kf);
  if (solver.info() != Eigen::Success) throw solver_error("stiffness factorization failed");
  Vec uf = solver.solve(rhs);
  if (solver.info() != Eigen::Success) throw solver_error("stiffness solve failed");
  for (int i = 0; i < nf; ++i) full[free_ids[i]] = uf[i];
  return full;
}

Vec solve_zero_mean(const P1System& sys, const Vec& load) {
  const int nv = sys.vertex_count;
  const Vec w = sys.mass * Vec::Ones(nv);
  if (std::abs(load.sum()) > 1e-8 * std::max(1.0, load.cwiseAbs().maxCoeff()) * nv)
    throw std::invalid_argument("incompatible data on a closed complex: <f,1> != 0");
  SpMat big(nv + 1, nv + 1);
  std::vector<Triplet> trips;
  for (int col = 0; col < sys.stiffness.outerSize(); ++col)
    for (SpMat::InnerIterator it(sys.stiffness, col); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int v = 0; v < nv; ++v) {
    trips.emplace_back(v, nv, w[v]);
    trips.emplace_back(nv, v, w[v]);
  }
  big.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<SpMat> solver(big);
  if (solver.info() != Eigen::Success) throw solver_error("gauged stiffness factorization failed");
  Vec rhs = Vec::Zero(nv + 1);
  rhs.head(nv) = load;
  Vec sol = solver.solve(rhs);
  const double resid = (big * sol - rhs).norm() / std::max(1e-300, rhs.norm());
  if (resid > 1e-8) throw solver_error("singular Galerkin system beyond the constant kernel");
  return sol.head(nv);
}

}  // namespace

Vec poisson_p1_load(const P1System& sys, const Vec& load, const PoissonBC& bc) {
  if (!bc.vertices.empty()) return solve_reduced(sys.stiffness, load, bc, sys.vertex_count);
  return solve_zero_mean(sys, load);
}

Vec poisson_p1(const P1System& sys, const Vec& f_vertex, const PoissonBC& bc) {
  return poisson_p1_load(sys, sys.mass * f_vertex, bc);
}

Vec assemble_load(const Complex& c, const DiscreteMetric& m, const Mat& positions,
                  const std::function<double(const Vec&)>& f, int quad_degree) {
  const int n = c.dim;
  const SimplexQuadrature quad = simplex_quadrature(n, quad_degree);
  double nfact = 1;
  for (int i = 2; i <= n; ++i) nfact *= i;
  Vec load = Vec::Zero(c.vertex_count);
  for (std::size_t e = 0; e < c.count(n); ++e) {
    const VertexTuple& verts = c.faces[n][e];
    const double vol = volume(simplex_lengths(c, m, n, static_cast<int>(e)));
    for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
      Vec x = Vec::Zero(positions.cols());
      for (int i = 0; i <= n; ++i) x += quad.nodes[q][i] * positions.row(verts[i]).transpose();
      const double fw = f(x) * quad.weights[q] * nfact * vol;
      for (int i = 0; i <= n; ++i) load[verts[i]] += fw * quad.nodes[q][i];
    }
  }
  return load;
}

double l2_norm(const P1System& sys, const Vec& u) { return std::sqrt(std::max(0.0, u.dot(sys.mass * u))); }

double energy_norm(const P1System& sys, const Vec& u) {
  return std::sqrt(std::max(0.0, u.dot(sys.stiffness * u)));
}

double l2_gauge_distance(const P1System& sys, const Vec& u, const Vec& v) {
  Vec d = u - v;
  const double total = (sys.mass * Vec::Ones(sys.vertex_count)).sum();
  const double mean = d.dot(sys.mass * Vec::Ones(sys.vertex_count)) / total;
  d.array() -= mean;
  return l2_norm(sys, d);
}

MetricComparison compare_metrics(const P1System& sys1, const P1System& sys2, const Vec& f_vertex,
                                 const PoissonBC& bc) {
  MetricComparison out;
  out.u1 = poisson_p1(sys1, f_vertex, bc);
  out.u2 = poisson_p1(sys2, f_vertex, bc);
  out.l2_diff = l2_gauge_distance(sys1, out.u1, out.u2);
  out.energy_diff = energy_norm(sys1, out.u1 - out.u2);
  return out;
}

std::vector<Vec> heat_flow(const P1System& sys, const Vec& u0, const Vec& f_vertex, double tau, int steps) {
  if (tau <= 0) throw std::invalid_argument("heat flow needs tau > 0");
  SpMat a = sys.mass + tau * sys.stiffness;
  Eigen::SimplicialLDLT<SpMat> solver(a);
  if (solver.info() != Eigen::Success) throw solver_error("heat flow factorization failed");
  std::vector<Vec> traj{u0};
  Vec mf = sys.mass * f_vertex;
  for (int s = 0; s < steps; ++s) {
    Vec rhs = sys.mass * traj.back() + tau * mf;
    traj.push_back(solver.solve(rhs));
  }
  return traj;
}

namespace {

// Coefficients expressing the flat gradient of the barycentric coordinate of
// `vertex` in the edge frame at that vertex: solve C^(v) a = -1.
Vec gradient_frame_coefficients(const EdgeLengths& el, int vertex) {
  const int n = el.order();
  Mat c(n, n);
  std::vector<int> others;
  for (int j = 0; j <= n; ++j)
    if (j != vertex) others.push_back(j);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double la = el.l(vertex, others[a]), lb = el.l(vertex, others[b]), lab = el.l(others[a], others[b]);
      c(a, b) = 0.5 * (la * la + lb * lb - lab * lab);
    }
  return c.partialPivLu().solve(-Vec::Ones(n));
}

}  // namespace

Mat mean_curvature_vertex(const ManifoldMesh& mesh, const DiscreteMetric& m) {
  const Complex& c = mesh.complex;
  const int n = c.dim;
  const int ambient = static_cast<int>(mesh.points.front().x.size());
  Mat h = Mat::Zero(c.vertex_count, ambient);
  for (std::size_t e = 0; e < c.count(n); ++e) {
    const VertexTuple& verts = c.faces[n][e];
    EdgeLengths el = simplex_lengths(c, m, n, static_cast<int>(e));
    if (is_degenerate(el)) throw degenerate_simplex("degenerate element in curvature assembly");
    const double vol = volume(el);
    for (int a = 0; a <= n; ++a) {
      const Vec coef = gradient_frame_coefficients(el, a);
      Vec grad = Vec::Zero(ambient);
      int slot = 0;
      for (int j = 0; j <= n; ++j) {
        if (j == a) continue;
        grad += coef[slot++] * log_map(mesh.points[verts[a]], mesh.points[verts[j]]).v;
      }
      // Mean-curvature-flow sign: area decreases along h.
      h.row(verts[a]) -= vol * grad.transpose();
    }
  }
  return h;
}

Mat mean_curvature_l2(const SpMat& mass, const Mat& vertex_gradients, const std::vector<int>& fixed) {
  Mat out = Mat::Zero(vertex_gradients.rows(), vertex_gradients.cols());
  PoissonBC bc;
  bc.vertices = fixed;
  bc.values = Vec::Zero(static_cast<int>(fixed.size()));
  for (int comp = 0; comp < vertex_gradients.cols(); ++comp) {
    Vec load = vertex_gradients.col(comp);
    Vec sol;
    if (fixed.empty()) {
      Eigen::SimplicialLDLT<SpMat> solver(mass);
      if (solver.info() != Eigen::Success) throw solver_error("mass factorization failed");
      sol = solver.solve(load);
    } else {
      sol = solve_reduced(mass, load, bc, static_cast<int>(mass.rows()));
    }
    out.col(comp) = sol;
  }
  return out;
}

SpMat dual_area_mass(const Complex& c, const DiscreteMetric& m) {
  Subdivision sub = subdivide(c, m);
  DualVolumes dv = dual_volumes(c, sub, m);
  SpMat mass(c.vertex_count, c.vertex_count);
  std::vector<Triplet> trips;
  for (std::size_t v = 0; v < c.count(0); ++v)
    trips.emplace_back(c.faces[0][v][0], c.faces[0][v][0], dv.nbhd[0][v]);
  mass.setFromTriplets(trips.begin(), trips.end());
  return mass;
}

double karcher_simplex_volume(const BarycentricMap& map, int quad_degree, double probe_eps) {
  const int n = map.order();
  const SimplexQuadrature quad = simplex_quadrature(n, quad_degree);
  double vol = 0;
  for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
    const Mat g = pullback_gram(map, quad.nodes[q], probe_eps);
    vol += quad.weights[q] * std::sqrt(std::max(0.0, g.determinant()));
  }
  return vol;
}

AreaDifferentialReport area_differential_check(const std::vector<Point>& simplex_vertices, int vertex,
                                               const Tangent& w, double eps, const SolverParams& params,
                                               int quad_degree, double probe_eps) {
  const int n = static_cast<int>(simplex_vertices.size()) - 1;
  AreaDifferentialReport rep;

  // Finite difference of the measured Riemannian volume.
  auto moved = [&](double t) {
    std::vector<Point> pts = simplex_vertices;
    Tangent step{pts[vertex], t * w.v};
    pts[vertex] = exp_map(pts[vertex], step);
    return karcher_simplex_volume(BarycentricMap(std::move(pts), params), quad_degree, probe_eps);
  };
  rep.finite_difference = (moved(eps) - moved(-eps)) / (2 * eps);

  // Flat differential: realize w in the edge frame at the vertex, transfer to
  // a barycentric velocity u, and evaluate |s| dlambda^vertex(u).
  Mat l = Mat::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) l(i, j) = l(j, i) = dist(simplex_vertices[i], simplex_vertices[j]);
  EdgeLengths el{std::move(l)};
  const double vol = volume(el);

  Mat frame_gram(n, n);
  Vec rhs(n);
  std::vector<int> others;
  for (int j = 0; j <= n; ++j)
    if (j != vertex) others.push_back(j);
  for (int a = 0; a < n; ++a) {
    const double la = el.l(vertex, others[a]);
    for (int b = 0; b < n; ++b) {
      const double lb = el.l(vertex, others[b]), lab = el.l(others[a], others[b]);
      frame_gram(a, b) = 0.5 * (la * la + lb * lb - lab * lab);
    }
    rhs[a] = inner(log_map(simplex_vertices[vertex], simplex_vertices[others[a]]), w);
  }
  const Vec coef = frame_gram.partialPivLu().solve(rhs);
  // u = sum_j coef_j (e_j - e_vertex); dlambda^vertex(u) = -sum coef.
  rep.formula = -vol * coef.sum();
  rep.gap = std::abs(rep.finite_difference - rep.formula);
  return rep;
}

}  // namespace kc
