#include "kc/fem.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace kc;

namespace {

Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

}  // namespace

TEST_SUITE_BEGIN("fem");

TEST_CASE("element matrices of the unit equilateral triangle") {
  Complex tri = build_complex({{0, 1, 2}});
  DiscreteMetric m = uniform_metric(tri, 1.0);
  P1System sys = assemble(tri, m);
  const double s3 = std::sqrt(3.0);
  Mat k = Mat(sys.stiffness);
  Mat mm = Mat(sys.mass);
  for (int i = 0; i < 3; ++i) {
    CHECK(k(i, i) == doctest::Approx(1.0 / s3).epsilon(1e-12));
    CHECK(mm(i, i) == doctest::Approx(s3 / 4 / 6).epsilon(1e-12));
    for (int j = 0; j < 3; ++j)
      if (i != j) {
        CHECK(k(i, j) == doctest::Approx(-1.0 / (2 * s3)).epsilon(1e-12));
        CHECK(mm(i, j) == doctest::Approx(s3 / 4 / 12).epsilon(1e-12));
      }
  }
}

TEST_CASE("assembled invariants: row sums") {
  PlanarMesh mesh = jittered_well_centred_mesh(5, 4, 0.08, 17);
  P1System sys = assemble(mesh.complex, mesh.metric);
  Vec krow = sys.stiffness * Vec::Ones(sys.vertex_count);
  CHECK(krow.cwiseAbs().maxCoeff() <= 1e-10);
  Vec mrow = sys.mass * Vec::Ones(sys.vertex_count);
  // each vertex accumulates a third of its adjacent element areas
  Vec adjacent = Vec::Zero(sys.vertex_count);
  for (std::size_t e = 0; e < mesh.complex.count(2); ++e) {
    const double vol = volume(simplex_lengths(mesh.complex, mesh.metric, 2, static_cast<int>(e)));
    for (int v : mesh.complex.faces[2][e]) adjacent[v] += vol / 3.0;
  }
  CHECK((mrow - adjacent).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK_THROWS_AS(assemble(build_complex({{0, 1, 2}}), DiscreteMetric{{1.0, 2.0, 1.0}}), degenerate_simplex);
}

TEST_CASE("Galerkin solve reproduces trial-space members") {
  PlanarMesh mesh = unit_square_mesh(6);
  P1System sys = assemble(mesh.complex, mesh.metric);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1, 1);
  Vec target = Vec::Zero(sys.vertex_count);
  std::vector<char> on_boundary(sys.vertex_count, 0);
  for (int v : mesh.boundary_vertices) on_boundary[v] = 1;
  for (int v = 0; v < sys.vertex_count; ++v)
    if (!on_boundary[v]) target[v] = u(rng);
  PoissonBC bc;
  bc.vertices = mesh.boundary_vertices;
  bc.values = Vec::Zero(static_cast<int>(bc.vertices.size()));
  Vec sol = poisson_p1_load(sys, sys.stiffness * target, bc);
  CHECK((sol - target).cwiseAbs().maxCoeff() <= 1e-10);

  // zero data, zero boundary: zero solution
  Vec zero = poisson_p1(sys, Vec::Zero(sys.vertex_count), bc);
  CHECK(zero.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("quadrature loads match the mass route for polynomial data") {
  PlanarMesh mesh = unit_square_mesh(4);
  // P1 data: the quadrature load equals mass times the vertex samples
  auto linear = [](const Vec& x) { return 2.0 - 0.5 * x[0] + 1.25 * x[1]; };
  Vec samples(mesh.complex.vertex_count);
  for (int v = 0; v < mesh.complex.vertex_count; ++v) samples[v] = linear(mesh.positions.row(v).transpose());
  P1System sys = assemble(mesh.complex, mesh.metric);
  Vec via_quadrature = assemble_load(mesh.complex, mesh.metric, mesh.positions, linear);
  CHECK((via_quadrature - sys.mass * samples).cwiseAbs().maxCoeff() <= 1e-12);
  // both routes drive the same solve
  PoissonBC bc;
  bc.vertices = mesh.boundary_vertices;
  bc.values = Vec::Zero(static_cast<int>(bc.vertices.size()));
  Vec u1 = poisson_p1(sys, samples, bc);
  Vec u2 = poisson_p1_load(sys, via_quadrature, bc);
  CHECK((u1 - u2).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("metric comparison: identical and uniformly scaled metrics") {
  ManifoldMesh mesh = icosphere_mesh(1);
  DiscreteMetric metric = mesh.geodesic_metric();
  P1System sys = assemble(mesh.complex, metric);
  Vec f(mesh.complex.vertex_count);
  for (int v = 0; v < mesh.complex.vertex_count; ++v) {
    const double z = mesh.points[v].x[2];
    f[v] = z * z - 1.0 / 3.0;
  }
  PoissonBC closed;
  MetricComparison same = compare_metrics(sys, sys, f, closed);
  CHECK(same.l2_diff <= 1e-12);
  CHECK(same.energy_diff <= 1e-12);

  DiscreteMetric scaled = metric;
  for (double& l : scaled.edge_length) l *= 1.0 + 1e-4;
  P1System sys2 = assemble(mesh.complex, scaled);
  MetricComparison cmp = compare_metrics(sys, sys2, f, closed);
  const double rel = cmp.l2_diff / l2_norm(sys, cmp.u1);
  CHECK(rel > 1e-5);
  CHECK(rel < 1e-3);

  // data with a mean on a closed complex is incompatible
  CHECK_THROWS_AS(poisson_p1(sys, Vec::Ones(mesh.complex.vertex_count), closed), std::invalid_argument);
}

TEST_CASE("heat flow conserves the mean and dissipates energy") {
  ManifoldMesh mesh = icosphere_mesh(1);
  DiscreteMetric metric = mesh.geodesic_metric();
  P1System sys = assemble(mesh.complex, metric);
  const int nv = sys.vertex_count;

  // constant initial data stays constant
  std::vector<Vec> flat = heat_flow(sys, Vec::Constant(nv, 0.7), Vec::Zero(nv), 0.01, 5);
  for (const Vec& state : flat) CHECK((state.array() - 0.7).abs().maxCoeff() <= 1e-12);

  Vec u0(nv);
  for (int v = 0; v < nv; ++v) u0[v] = mesh.points[v].x[2];
  std::vector<Vec> traj = heat_flow(sys, u0, Vec::Zero(nv), 0.02, 10);
  const Vec ones = Vec::Ones(nv);
  const double mean0 = u0.dot(sys.mass * ones);
  double prev_energy = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < traj.size(); ++s) {
    CHECK(std::abs(traj[s].dot(sys.mass * ones) - mean0) <= 1e-12 * std::max(1.0, std::abs(mean0)));
    const double energy = traj[s].dot(sys.stiffness * traj[s]);
    if (s > 0) CHECK(energy < prev_energy + 1e-12);
    prev_energy = energy;
  }
  CHECK_THROWS_AS(heat_flow(sys, u0, Vec::Zero(nv), -1.0, 1), std::invalid_argument);

  // with a time-constant source the free energy 1/2 <du,du> - <f,u> decays
  Vec f(nv);
  for (int v = 0; v < nv; ++v) {
    const double z = mesh.points[v].x[2];
    f[v] = z * z - 1.0 / 3.0;
  }
  std::vector<Vec> forced = heat_flow(sys, u0, f, 0.02, 10);
  double prev = std::numeric_limits<double>::infinity();
  for (const Vec& state : forced) {
    const double free_energy = 0.5 * state.dot(sys.stiffness * state) - (sys.mass * f).dot(state);
    CHECK(free_energy < prev + 1e-12);
    prev = free_energy;
  }
}

TEST_CASE("area gradients vanish on flat interiors and point inward on the icosahedron") {
  PlanarMesh flat = unit_square_mesh(5);
  Mat pos3 = Mat::Zero(flat.positions.rows(), 3);
  pos3.leftCols(2) = flat.positions;
  ManifoldMesh embedded;
  embedded.complex = flat.complex;
  for (int v = 0; v < pos3.rows(); ++v)
    embedded.points.push_back(make_point(ManifoldTag::euclidean(3), pos3.row(v).transpose()));
  DiscreteMetric metric = embedded.geodesic_metric();
  Mat grad = mean_curvature_vertex(embedded, metric);
  std::vector<char> on_boundary(flat.complex.vertex_count, 0);
  for (int v : flat.boundary_vertices) on_boundary[v] = 1;
  for (int v = 0; v < grad.rows(); ++v)
    if (!on_boundary[v]) CHECK(grad.row(v).norm() <= 1e-10);

  // closed surface: translation invariance makes the gradients sum to zero
  ManifoldMesh ico = icosphere_mesh(0, ManifoldKind::euclidean);
  DiscreteMetric im = ico.geodesic_metric();
  Mat h = mean_curvature_vertex(ico, im);
  CHECK(h.colwise().sum().cwiseAbs().maxCoeff() <= 1e-9);
  // by symmetry every vertex vector is radially inward
  for (int v = 0; v < h.rows(); ++v) {
    Vec dir = h.row(v).transpose().normalized();
    CHECK((dir + ico.points[v].x).norm() <= 1e-9);
  }
}

TEST_CASE("mass solve for the curvature field") {
  ManifoldMesh ico = icosphere_mesh(2, ManifoldKind::euclidean);
  DiscreteMetric metric = ico.geodesic_metric();
  Mat hl2 = mean_curvature_vertex(ico, metric);
  Mat h = mean_curvature_l2(dual_area_mass(ico.complex, metric), hl2);
  for (int v = 0; v < h.rows(); ++v) {
    CHECK(h.row(v).norm() == doctest::Approx(2.0).epsilon(0.05));
    Vec dir = h.row(v).transpose().normalized();
    CHECK((dir + ico.points[v].x).norm() < 0.05);
  }
  // zero gradient gives the zero field
  Mat zero = mean_curvature_l2(assemble(ico.complex, metric).mass, Mat::Zero(h.rows(), 3));
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("area differential: flat exactness and the height formula") {
  const ManifoldTag e2 = ManifoldTag::euclidean(2);
  std::vector<Point> tri{make_point(e2, (Vec(2) << 0, 0).finished()),
                         make_point(e2, (Vec(2) << 1, 0).finished()),
                         make_point(e2, (Vec(2) << 0.5, std::sqrt(3.0) / 2).finished())};
  // generic direction: measured derivative equals the formula
  Tangent w = make_tangent(tri[0], (Vec(2) << 0.4, -0.8).finished());
  AreaDifferentialReport rep = area_differential_check(tri, 0, w, 1e-4);
  CHECK(rep.gap <= 1e-6);

  // moving vertex 0 along the height direction (perpendicular to the
  // opposite edge): |ds|/h_i
  Tangent toward = make_tangent(tri[0], (Vec(2) << 0.75, std::sqrt(3.0) / 4).finished());
  toward.v.normalize();
  AreaDifferentialReport hrep = area_differential_check(tri, 0, toward, 1e-4);
  const double area = std::sqrt(3.0) / 4;
  const double height = std::sqrt(3.0) / 2;
  CHECK(std::abs(hrep.formula) == doctest::Approx(area / height).epsilon(1e-9));

  // curved case carries a nonzero but small gap; probe within the meridian
  // plane of the vertex, transversal to the configuration's symmetry
  std::vector<Point> sphere_tri = polar_triangle(0.2);
  const Eigen::Vector3d base = sphere_tri[0].x;
  Tangent ws = make_tangent(sphere_tri[0], base.cross(base.unitOrthogonal()));
  ws.v.normalize();
  AreaDifferentialReport srep = area_differential_check(sphere_tri, 0, ws, 1e-3, SolverParams{1e-12, 300});
  Mat l = Mat::Zero(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) l(i, j) = l(j, i) = dist(sphere_tri[i], sphere_tri[j]);
  const double vol = volume(EdgeLengths{l});
  const double h = l.maxCoeff();
  CHECK(srep.gap / vol < 0.5 * h);
  CHECK(srep.gap / vol > 1e-6);
}

TEST_CASE("pullback assembly matches the flat assembly on Euclidean meshes") {
  const ManifoldTag e2 = ManifoldTag::euclidean(2);
  ManifoldMesh mesh;
  mesh.complex = build_complex({{0, 1, 2}, {1, 3, 2}});
  mesh.points = {make_point(e2, (Vec(2) << 0, 0).finished()), make_point(e2, (Vec(2) << 1, 0).finished()),
                 make_point(e2, (Vec(2) << 0.2, 0.9).finished()),
                 make_point(e2, (Vec(2) << 1.1, 1.0).finished())};
  DiscreteMetric metric = mesh.geodesic_metric();
  P1System flat = assemble(mesh.complex, metric);
  P1System pulled = assemble_pullback(mesh, SolverParams{1e-12, 200});
  CHECK((Mat(flat.stiffness) - Mat(pulled.stiffness)).cwiseAbs().maxCoeff() <= 1e-7);
  CHECK((Mat(flat.mass) - Mat(pulled.mass)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(pulled.source == MetricSource::pullback_quadrature);
}

TEST_SUITE_END();
