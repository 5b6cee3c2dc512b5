#pragma once

#include "kc/types.hpp"

#include <limits>
#include <string>

namespace kc {

enum class ManifoldKind { euclidean, sphere, hyperbolic, flat_torus };

std::string to_string(ManifoldKind kind);
ManifoldKind manifold_kind_from_string(const std::string& name);

// Tagged model manifold: Euclidean R^m, unit sphere S^m in R^{m+1},
// hyperboloid model of H^m in Minkowski R^{m+1}, flat torus R^m/Z^m.
struct ManifoldTag {
  ManifoldKind kind = ManifoldKind::euclidean;
  int dim = 0;  // intrinsic dimension m

  int ambient_dim() const {
    return (kind == ManifoldKind::sphere || kind == ManifoldKind::hyperbolic) ? dim + 1 : dim;
  }
  bool operator==(const ManifoldTag&) const = default;

  static ManifoldTag euclidean(int m) { return {ManifoldKind::euclidean, m}; }
  static ManifoldTag sphere(int m) { return {ManifoldKind::sphere, m}; }
  static ManifoldTag hyperbolic(int m) { return {ManifoldKind::hyperbolic, m}; }
  static ManifoldTag flat_torus(int m) { return {ManifoldKind::flat_torus, m}; }
};

struct CurvatureBounds {
  double c0 = 0;  // bound on |R|
  double c1 = 0;  // bound on |nabla R|
  double inj = std::numeric_limits<double>::infinity();
  double cvr = std::numeric_limits<double>::infinity();  // convexity radius
};

struct Point {
  ManifoldTag tag;
  Vec x;  // ambient coordinates
};

struct Tangent {
  Point base;
  Vec v;  // ambient representation
};

CurvatureBounds curvature_bounds(const ManifoldTag& tag);

// Builds a point and enforces the model invariants (unit norm on the sphere,
// Minkowski normalisation on the hyperboloid, coordinates wrapped to [0,1)
// on the torus). Throws invalid_argument when the coordinates are not on the
// model within tolerance.
Point make_point(const ManifoldTag& tag, Vec coords);

// Projects an ambient vector onto the tangent space at p.
Tangent make_tangent(const Point& p, Vec ambient);

double dist(const Point& p, const Point& q);

// Riemannian logarithm: the tangent at p pointing to q with |log| = dist(p,q).
Tangent log_map(const Point& p, const Point& q);

// Riemannian exponential. Requires |v| < inj for sphere and torus.
Point exp_map(const Point& p, const Tangent& v);

// Parallel transport of v (based at p) along the unique geodesic p ~> q.
Tangent parallel_transport(const Point& p, const Point& q, const Tangent& v);

// Metric inner product of two tangents at a common base point.
double inner(const Tangent& a, const Tangent& b);
double norm(const Tangent& a);

// Minkowski form <u,v>_L = -u0 v0 + u1 v1 + ... (hyperboloid model helper).
double minkowski(const Vec& u, const Vec& v);

}  // namespace kc
