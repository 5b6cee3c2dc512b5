#include "kc/manifold.hpp"

#include <cmath>
#include <numbers>

namespace kc {

namespace {

constexpr double kPi = std::numbers::pi;

void require_same_tag(const ManifoldTag& a, const ManifoldTag& b) {
  if (!(a == b)) throw tag_mismatch("points live on different manifolds");
}

// Representative of d in (-1/2, 1/2], ties at 1/2 resolve to +1/2.
double wrap_half(double d) { return d - std::ceil(d - 0.5); }

double wrap_unit(double x) {
  double y = x - std::floor(x);
  if (y >= 1.0) y = 0.0;  // guard against rounding at the seam
  return y;
}

}  // namespace

std::string to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::euclidean: return "euclidean";
    case ManifoldKind::sphere: return "sphere";
    case ManifoldKind::hyperbolic: return "hyperbolic";
    case ManifoldKind::flat_torus: return "flat_torus";
  }
  return "?";
}

ManifoldKind manifold_kind_from_string(const std::string& name) {
  if (name == "euclidean") return ManifoldKind::euclidean;
  if (name == "sphere") return ManifoldKind::sphere;
  if (name == "hyperbolic") return ManifoldKind::hyperbolic;
  if (name == "flat_torus" || name == "torus") return ManifoldKind::flat_torus;
  throw std::invalid_argument("unknown manifold kind: " + name);
}

double minkowski(const Vec& u, const Vec& v) {
  double s = -u[0] * v[0];
  for (int i = 1; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

CurvatureBounds curvature_bounds(const ManifoldTag& tag) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (tag.kind) {
    case ManifoldKind::euclidean: return {0, 0, inf, inf};
    case ManifoldKind::sphere: return {1, 0, kPi, kPi / 2};
    case ManifoldKind::hyperbolic: return {1, 0, inf, inf};
    case ManifoldKind::flat_torus: return {0, 0, 0.5, 0.25};
  }
  return {};
}

Point make_point(const ManifoldTag& tag, Vec coords) {
  if (coords.size() != tag.ambient_dim())
    throw std::invalid_argument("coordinate size does not match ambient dimension");
  switch (tag.kind) {
    case ManifoldKind::euclidean:
      break;
    case ManifoldKind::sphere: {
      double n = coords.norm();
      if (std::abs(n - 1.0) > 1e-10) throw std::invalid_argument("sphere point is not unit length");
      coords /= n;
      break;
    }
    case ManifoldKind::hyperbolic: {
      double q = minkowski(coords, coords);
      if (std::abs(q + 1.0) > 1e-10 || coords[0] <= 0)
        throw std::invalid_argument("point is not on the upper hyperboloid");
      coords /= std::sqrt(-q);
      break;
    }
    case ManifoldKind::flat_torus: {
      for (int i = 0; i < coords.size(); ++i) coords[i] = wrap_unit(coords[i]);
      break;
    }
  }
  return Point{tag, std::move(coords)};
}

Tangent make_tangent(const Point& p, Vec ambient) {
  if (ambient.size() != p.x.size()) throw std::invalid_argument("tangent size mismatch");
  switch (p.tag.kind) {
    case ManifoldKind::sphere:
      ambient -= ambient.dot(p.x) * p.x;
      break;
    case ManifoldKind::hyperbolic:
      ambient += minkowski(ambient, p.x) * p.x;  // <q,q>_L = -1
      break;
    default:
      break;
  }
  return Tangent{p, std::move(ambient)};
}

double inner(const Tangent& a, const Tangent& b) {
  require_same_tag(a.base.tag, b.base.tag);
  if (a.base.tag.kind == ManifoldKind::hyperbolic) return minkowski(a.v, b.v);
  return a.v.dot(b.v);
}

double norm(const Tangent& a) {
  if (a.base.tag.kind == ManifoldKind::hyperbolic)
    return std::sqrt(std::max(0.0, minkowski(a.v, a.v)));
  return a.v.norm();
}

double dist(const Point& p, const Point& q) {
  require_same_tag(p.tag, q.tag);
  switch (p.tag.kind) {
    case ManifoldKind::euclidean:
      return (p.x - q.x).norm();
    case ManifoldKind::sphere: {
      double c = std::clamp(p.x.dot(q.x), -1.0, 1.0);
      return std::acos(c);
    }
    case ManifoldKind::hyperbolic: {
      double c = std::max(1.0, -minkowski(p.x, q.x));
      return std::acosh(c);
    }
    case ManifoldKind::flat_torus: {
      double s = 0;
      for (int i = 0; i < p.x.size(); ++i) {
        double d = wrap_half(q.x[i] - p.x[i]);
        s += d * d;
      }
      return std::sqrt(s);
    }
  }
  return 0;
}

Tangent log_map(const Point& p, const Point& q) {
  require_same_tag(p.tag, q.tag);
  const int d = p.x.size();
  switch (p.tag.kind) {
    case ManifoldKind::euclidean:
      return Tangent{p, q.x - p.x};
    case ManifoldKind::sphere: {
      double c = std::clamp(p.x.dot(q.x), -1.0, 1.0);
      if (c <= -1.0 + 1e-12) throw cut_locus_error("sphere log at antipodal point");
      double theta = std::acos(c);
      Vec w = q.x - c * p.x;
      double wn = w.norm();
      if (wn < 1e-15) return Tangent{p, Vec::Zero(d)};
      return Tangent{p, (theta / wn) * w};
    }
    case ManifoldKind::hyperbolic: {
      double c = std::max(1.0, -minkowski(p.x, q.x));
      double theta = std::acosh(c);
      Vec w = q.x - c * p.x;
      double wn = std::sqrt(std::max(0.0, minkowski(w, w)));
      if (wn < 1e-15) return Tangent{p, Vec::Zero(d)};
      return Tangent{p, (theta / wn) * w};
    }
    case ManifoldKind::flat_torus: {
      Vec v(d);
      for (int i = 0; i < d; ++i) v[i] = wrap_half(q.x[i] - p.x[i]);
      return Tangent{p, v};
    }
  }
  return Tangent{p, Vec::Zero(d)};
}

Point exp_map(const Point& p, const Tangent& t) {
  require_same_tag(p.tag, t.base.tag);
  if ((t.base.x - p.x).norm() > 1e-9) throw tag_mismatch("tangent is not based at p");
  const double len = norm(t);
  switch (p.tag.kind) {
    case ManifoldKind::euclidean:
      return Point{p.tag, p.x + t.v};
    case ManifoldKind::sphere: {
      if (len >= kPi) throw cut_locus_error("sphere exp beyond injectivity radius");
      if (len < 1e-300) return p;
      Vec y = std::cos(len) * p.x + (std::sin(len) / len) * t.v;
      y /= y.norm();
      return Point{p.tag, y};
    }
    case ManifoldKind::hyperbolic: {
      if (len < 1e-300) return p;
      Vec y = std::cosh(len) * p.x + (std::sinh(len) / len) * t.v;
      double q = minkowski(y, y);
      y /= std::sqrt(-q);
      return Point{p.tag, y};
    }
    case ManifoldKind::flat_torus: {
      if (len >= 0.5) throw cut_locus_error("torus exp beyond injectivity radius");
      Vec y = p.x + t.v;
      for (int i = 0; i < y.size(); ++i) y[i] = wrap_unit(y[i]);
      return Point{p.tag, y};
    }
  }
  return p;
}

Tangent parallel_transport(const Point& p, const Point& q, const Tangent& t) {
  require_same_tag(p.tag, q.tag);
  require_same_tag(p.tag, t.base.tag);
  switch (p.tag.kind) {
    case ManifoldKind::euclidean:
    case ManifoldKind::flat_torus:
      return Tangent{q, t.v};
    case ManifoldKind::sphere: {
      double c = std::clamp(p.x.dot(q.x), -1.0, 1.0);
      if (c <= -1.0 + 1e-12) throw cut_locus_error("no unique geodesic between antipodal points");
      Tangent lg = log_map(p, q);
      double theta = norm(lg);
      if (theta < 1e-14) return make_tangent(q, t.v);
      Vec e = lg.v / theta;
      double a = e.dot(t.v);
      Vec res = t.v - a * e + a * (std::cos(theta) * e - std::sin(theta) * p.x);
      return make_tangent(q, res);
    }
    case ManifoldKind::hyperbolic: {
      Tangent lg = log_map(p, q);
      double theta = norm(lg);
      if (theta < 1e-14) return make_tangent(q, t.v);
      Vec e = lg.v / theta;
      double a = minkowski(e, t.v);
      Vec res = t.v - a * e + a * (std::cosh(theta) * e + std::sinh(theta) * p.x);
      return make_tangent(q, res);
    }
  }
  return Tangent{q, t.v};
}

}  // namespace kc
