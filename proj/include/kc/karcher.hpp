#pragma once

#include "kc/complex.hpp"
#include "kc/manifold.hpp"

#include <span>

namespace kc {

struct SolverParams {
  double tol = 1e-10;
  int max_iter = 200;
};

struct MeanReport {
  Point point;
  int iterations = 0;
  double residual = 0;
};

// Weighted sum of squared geodesic distances, sum_i lambda_i d(a, p_i)^2.
double energy(const Point& a, const Vec& lambda, std::span<const Point> pts);

// Weighted geodesic centre of mass by fixed-point iteration
// a <- exp_a(sum_i lambda_i log_a p_i), seeded at the heaviest vertex.
// Throws solver_error when max_iter is exceeded and std::invalid_argument
// when the points violate the convexity-ball precondition.
MeanReport karcher_mean(std::span<const Point> pts, const Vec& lambda, const SolverParams& params = {});

// Map from the standard simplex into the manifold through weighted centres
// of mass of fixed vertices.
class BarycentricMap {
 public:
  explicit BarycentricMap(std::vector<Point> vertices, SolverParams params = {});

  int order() const { return static_cast<int>(vertices_.size()) - 1; }
  const std::vector<Point>& vertices() const { return vertices_; }
  const ManifoldTag& tag() const { return vertices_.front().tag; }
  const SolverParams& solver() const { return params_; }

  Point operator()(const Vec& lambda) const;
  MeanReport solve(const Vec& lambda) const;

  // Tangent metric induced by the pairwise geodesic distances (flat
  // comparison metric on the standard simplex).
  const Mat& edge_metric_form() const { return edge_form_; }
  double flat_norm(const Vec& v) const;
  double flat_inner(const Vec& v, const Vec& w) const;
  double mesh_size() const { return mesh_size_; }

 private:
  std::vector<Point> vertices_;
  SolverParams params_;
  Mat edge_form_;
  double mesh_size_ = 0;
};

// Differential of the map at lambda in direction v by central differences,
// (log_x x(lambda + eps v) - log_x x(lambda - eps v)) / (2 eps).
Tangent map_differential(const BarycentricMap& map, const Vec& lambda, const Vec& v, double eps);

// Pulled-back metric value g(dx v, dx w) at lambda.
double pullback_metric(const BarycentricMap& map, const Vec& lambda, const Vec& v, const Vec& w, double eps);

// |log_x x(lambda+eps v) + log_x x(lambda-eps v)| / eps^2, a second-difference
// estimate of |nabla dx (v,v)|.
double connection_defect(const BarycentricMap& map, const Vec& lambda, const Vec& v, double eps);

struct DistortionSample {
  double metric_defect = 0;      // sup |(x*g - g^e)(v,w)| / (|v| |w|), flat norms
  double connection_defect = 0;  // sup |nabla dx(v,v)| / |v|^2, flat norms
};

// Probes edge directions and mixed directions at one barycentric point.
DistortionSample measure_distortion(const BarycentricMap& map, const Vec& lambda, double eps);

// Smallest eigenvalue of the pulled-back Gram matrix at lambda, relative to
// the flat one. Positive values monitor injectivity of the map; the bound is
// reported, not enforced.
double pullback_definiteness(const BarycentricMap& map, const Vec& lambda, double eps);

// Lagrange interpolation of vertex samples, linear in lambda.
double interpolate_scalar(const Vec& lambda, const Vec& vertex_values);

// Composite interpolation of a map between manifolds: for a flat source
// domain the parameter is the identity, so the interpolant at lambda is the
// barycentric map through the image vertices.
Point interpolate_map(const BarycentricMap& image_map, const Vec& lambda);

struct DelaunayResult {
  Complex complex;
  DiscreteMetric metric;
  std::vector<Point> points;
};

// Voronoi-dual complex of a vertex set on a closed 2-manifold, computed by
// brute-force nearest-vertex labeling of a dense sample set. Throws
// non_generic for configurations without a regular dual complex.
DelaunayResult delaunay(const ManifoldTag& tag, const std::vector<Point>& pts, int resolution);

}  // namespace kc
