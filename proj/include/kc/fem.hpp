#pragma once

#include "kc/complex.hpp"
#include "kc/karcher.hpp"
#include "kc/meshes.hpp"

#include <optional>

namespace kc {

enum class MetricSource { edge_lengths, pullback_quadrature };

struct P1System {
  SpMat stiffness;
  SpMat mass;
  MetricSource source = MetricSource::edge_lengths;
  int vertex_count = 0;
};

// Element stiffness |e| Q^{ij}, element mass |e| (1 + delta_ij)/((n+1)(n+2)).
P1System assemble(const Complex& c, const DiscreteMetric& m);

// Same matrices with the element metric replaced by the pulled-back metric of
// the piecewise barycentric map, sampled at quadrature nodes.
P1System assemble_pullback(const ManifoldMesh& mesh, const SolverParams& params = {}, int quad_degree = 2,
                           double probe_eps = 0.05);

struct PoissonBC {
  // Dirichlet values on listed vertices; empty means the mean-zero gauge on
  // a closed complex.
  std::vector<int> vertices;
  Vec values;
};

// Galerkin solve with rhs = mass * f_vertex. Throws on incompatible data.
Vec poisson_p1(const P1System& sys, const Vec& f_vertex, const PoissonBC& bc);
// Galerkin solve with a directly assembled load vector.
Vec poisson_p1_load(const P1System& sys, const Vec& load, const PoissonBC& bc);

// Load vector from element quadrature of a sampled source against the hat
// functions, for complexes with embedded vertex positions (rows).
Vec assemble_load(const Complex& c, const DiscreteMetric& m, const Mat& positions,
                  const std::function<double(const Vec&)>& f, int quad_degree = 4);

double l2_norm(const P1System& sys, const Vec& u);
double energy_norm(const P1System& sys, const Vec& u);
// L2 distance after projecting out constants (mass-weighted means aligned).
double l2_gauge_distance(const P1System& sys, const Vec& u, const Vec& v);

struct MetricComparison {
  Vec u1, u2;
  double l2_diff = 0;
  double energy_diff = 0;
};

MetricComparison compare_metrics(const P1System& sys1, const P1System& sys2, const Vec& f_vertex,
                                 const PoissonBC& bc);

// Implicit Euler steps of (M + tau K) u^j = M u^{j-1} + tau M f.
std::vector<Vec> heat_flow(const P1System& sys, const Vec& u0, const Vec& f_vertex, double tau, int steps);

// Mean-curvature-flow velocity at each vertex: minus the gradient of total
// element volume with respect to that vertex, realized in the ambient
// tangent space through log-based edge frames. Rows are ambient vectors.
Mat mean_curvature_vertex(const ManifoldMesh& mesh, const DiscreteMetric& m);

// Mass-matrix solve M H = rhs, componentwise in ambient coordinates;
// rows in `fixed` are constrained to zero. The mass can be the Galerkin
// matrix or the diagonal of circumcentric dual areas; the latter is exact
// for the magnitude on symmetric meshes.
Mat mean_curvature_l2(const SpMat& mass, const Mat& vertex_gradients, const std::vector<int>& fixed = {});

// Diagonal mass of circumcentric dual areas |U(vertex)| (requires a
// well-centred complex).
SpMat dual_area_mass(const Complex& c, const DiscreteMetric& m);

struct AreaDifferentialReport {
  double finite_difference = 0;  // derivative of the quadrature-computed volume
  double formula = 0;            // flat-metric differential |s| dlambda^i(u)
  double gap = 0;
};

// Moves vertex `i` of the simplex along the ambient tangent w and compares
// the measured volume derivative with the flat differential.
AreaDifferentialReport area_differential_check(const std::vector<Point>& simplex_vertices, int vertex,
                                               const Tangent& w, double eps, const SolverParams& params = {},
                                               int quad_degree = 4, double probe_eps = 0.05);

// Riemannian volume of a Karcher simplex by quadrature of the pulled-back
// volume density.
double karcher_simplex_volume(const BarycentricMap& map, int quad_degree = 4, double probe_eps = 0.05);

}  // namespace kc
