#include "kc/manifold.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace kc;

namespace {

constexpr double kPi = std::numbers::pi;

Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

Point sphere_pt(double a, double b, double c) {
  Vec v = v3(a, b, c);
  return make_point(ManifoldTag::sphere(2), v / v.norm());
}

// Random points and nearby partners at controlled distance.
struct PairSampler {
  std::mt19937_64 rng{42};
  std::normal_distribution<double> gauss{0, 1};
  std::uniform_real_distribution<double> unif{0.05, 1};

  Point random_point(const ManifoldTag& tag) {
    const int d = tag.ambient_dim();
    Vec x(d);
    switch (tag.kind) {
      case ManifoldKind::euclidean:
        for (int i = 0; i < d; ++i) x[i] = gauss(rng);
        return make_point(tag, x);
      case ManifoldKind::sphere: {
        for (int i = 0; i < d; ++i) x[i] = gauss(rng);
        return make_point(tag, x / x.norm());
      }
      case ManifoldKind::hyperbolic: {
        Vec base = Vec::Zero(d);
        base[0] = 1;
        Point o = make_point(tag, base);
        Vec t = Vec::Zero(d);
        for (int i = 1; i < d; ++i) t[i] = 0.7 * gauss(rng);
        return exp_map(o, make_tangent(o, t));
      }
      case ManifoldKind::flat_torus:
        for (int i = 0; i < d; ++i) x[i] = unif(rng);
        return make_point(tag, x);
    }
    return make_point(tag, x);
  }

  Point nearby(const Point& p, double max_dist) {
    Vec t(p.x.size());
    for (int i = 0; i < t.size(); ++i) t[i] = gauss(rng);
    Tangent v = make_tangent(p, t);
    const double n = norm(v);
    v.v *= max_dist * unif(rng) / (n > 0 ? n : 1);
    return exp_map(p, v);
  }
};

const ManifoldTag kAllTags[4] = {ManifoldTag::euclidean(2), ManifoldTag::sphere(2), ManifoldTag::hyperbolic(2),
                                 ManifoldTag::flat_torus(2)};

}  // namespace

TEST_SUITE_BEGIN("manifold");

TEST_CASE("distance on the four models") {
  CHECK(dist(sphere_pt(1, 0, 0), sphere_pt(0, 1, 0)) == doctest::Approx(kPi / 2).epsilon(1e-12));
  const ManifoldTag e2 = ManifoldTag::euclidean(2);
  CHECK(dist(make_point(e2, (Vec(2) << 0, 0).finished()), make_point(e2, (Vec(2) << 3, 4).finished())) ==
        doctest::Approx(5.0));
  const ManifoldTag t1 = ManifoldTag::flat_torus(1);
  CHECK(dist(make_point(t1, (Vec(1) << 0.1).finished()), make_point(t1, (Vec(1) << 0.9).finished())) ==
        doctest::Approx(0.2));
  PairSampler s;
  for (const ManifoldTag& tag : kAllTags) {
    Point p = s.random_point(tag), q = s.random_point(tag);
    CHECK(dist(p, q) == doctest::Approx(dist(q, p)).epsilon(1e-12));
    CHECK(dist(p, p) == doctest::Approx(0.0));
  }
}

TEST_CASE("distance rejects mismatched tags") {
  Point a = sphere_pt(1, 0, 0);
  Point b = make_point(ManifoldTag::euclidean(3), v3(1, 0, 0));
  CHECK_THROWS_AS(dist(a, b), tag_mismatch);
}

TEST_CASE("log of the base point vanishes and hits the quarter circle") {
  Point p = sphere_pt(1, 0, 0);
  CHECK(norm(log_map(p, p)) == doctest::Approx(0.0));
  Tangent t = log_map(p, sphere_pt(0, 1, 0));
  CHECK((t.v - v3(0, kPi / 2, 0)).norm() < 1e-12);
}

TEST_CASE("exp examples") {
  Point p = sphere_pt(1, 0, 0);
  CHECK((exp_map(p, make_tangent(p, v3(0, kPi / 2, 0))).x - v3(0, 1, 0)).norm() < 1e-12);
  CHECK((exp_map(p, Tangent{p, Vec::Zero(3)}).x - p.x).norm() == doctest::Approx(0.0));
  // hyperbolic arclength parametrisation
  const ManifoldTag h2 = ManifoldTag::hyperbolic(2);
  Point o = make_point(h2, v3(1, 0, 0));
  Point q = exp_map(o, make_tangent(o, v3(0, 1, 0)));
  CHECK(dist(o, q) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q.x[0] == doctest::Approx(std::cosh(1.0)));
  CHECK(q.x[1] == doctest::Approx(std::sinh(1.0)));
}

TEST_CASE("exp/log round trip on all models") {
  PairSampler s;
  for (const ManifoldTag& tag : kAllTags) {
    const CurvatureBounds cb = curvature_bounds(tag);
    const double reach = std::isfinite(cb.inj) ? 0.45 * cb.inj : 1.5;
    for (int i = 0; i < 100; ++i) {
      Point p = s.random_point(tag);
      Point q = s.nearby(p, reach);
      Point back = exp_map(p, log_map(p, q));
      // coordinate comparison: the distance function itself is only
      // sqrt(eps)-accurate between nearly equal points
      const double coord_gap = tag.kind == ManifoldKind::flat_torus ? dist(back, q) : (back.x - q.x).norm();
      CHECK(coord_gap < 1e-9);
      CHECK(std::abs(norm(log_map(p, q)) - dist(p, q)) < 1e-10);
    }
  }
}

TEST_CASE("constant-speed geodesics") {
  PairSampler s;
  for (const ManifoldTag& tag : kAllTags) {
    const CurvatureBounds cb = curvature_bounds(tag);
    const double reach = std::isfinite(cb.inj) ? 0.24 * cb.inj : 1.0;
    Point p = s.random_point(tag);
    Vec raw(p.x.size());
    for (int i = 0; i < raw.size(); ++i) raw[i] = 0.3 + 0.1 * i;
    Tangent v = make_tangent(p, raw);
    v.v *= 1.0 / norm(v);
    Tangent v1{p, 0.3 * reach * v.v}, v2{p, 0.9 * reach * v.v};
    CHECK(std::abs(dist(exp_map(p, v1), exp_map(p, v2)) - 0.6 * reach) < 1e-8);
  }
}

TEST_CASE("parallel transport is an isometry with flat identity") {
  const ManifoldTag e3 = ManifoldTag::euclidean(3);
  Point p = make_point(e3, v3(0, 1, 2)), q = make_point(e3, v3(4, 4, 4));
  Tangent v = make_tangent(p, v3(1, 2, 3));
  CHECK((parallel_transport(p, q, v).v - v.v).norm() == doctest::Approx(0.0));

  // equator transport keeps the pole direction
  Point a = sphere_pt(1, 0, 0), b = sphere_pt(0, 1, 0);
  Tangent up = make_tangent(a, v3(0, 0, 1));
  CHECK((parallel_transport(a, b, up).v - v3(0, 0, 1)).norm() < 1e-12);
}

TEST_CASE("transport preserves the Gram matrix of a frame") {
  PairSampler s;
  for (const ManifoldTag& tag : {ManifoldTag::sphere(2), ManifoldTag::hyperbolic(2)}) {
    Point p = s.random_point(tag);
    Point q = s.nearby(p, 1.0);
    Tangent u = make_tangent(p, v3(0.3, -0.2, 0.9));
    Tangent v = make_tangent(p, v3(-1.1, 0.4, 0.2));
    Tangent pu = parallel_transport(p, q, u), pv = parallel_transport(p, q, v);
    CHECK(std::abs(inner(pu, pu) - inner(u, u)) < 1e-10);
    CHECK(std::abs(inner(pv, pv) - inner(v, v)) < 1e-10);
    CHECK(std::abs(inner(pu, pv) - inner(u, v)) < 1e-10);
  }
}

TEST_CASE("octant loop holonomy rotates the tangent plane by a right angle") {
  // The loop encloses one octant of area pi/2, so the holonomy is a rotation
  // by pi/2 and transported vectors end up orthogonal to where they started.
  Point a = sphere_pt(1, 0, 0), b = sphere_pt(0, 1, 0), c = sphere_pt(0, 0, 1);
  Tangent v = make_tangent(a, v3(0, 0.6, 0.8));
  Tangent looped = parallel_transport(c, a, parallel_transport(b, c, parallel_transport(a, b, v)));
  CHECK(std::abs(inner(looped, v)) / (norm(v) * norm(looped)) < 1e-12);
  CHECK(norm(looped) == doctest::Approx(norm(v)).epsilon(1e-12));
}

TEST_CASE("reversal identity") {
  PairSampler s;
  for (const ManifoldTag& tag : kAllTags) {
    const CurvatureBounds cb = curvature_bounds(tag);
    const double reach = std::isfinite(cb.inj) ? 0.4 * cb.inj : 1.2;
    for (int i = 0; i < 20; ++i) {
      Point p = s.random_point(tag), q = s.nearby(p, reach);
      Tangent fwd = log_map(p, q);
      Tangent rev = parallel_transport(q, p, log_map(q, p));
      CHECK((fwd.v + rev.v).norm() < 1e-9);
    }
  }
}

TEST_CASE("curvature bound table") {
  CHECK(curvature_bounds(ManifoldTag::sphere(2)).c0 == 1);
  CHECK(curvature_bounds(ManifoldTag::sphere(2)).c1 == 0);
  CHECK(curvature_bounds(ManifoldTag::sphere(2)).inj == doctest::Approx(kPi));
  CHECK(curvature_bounds(ManifoldTag::sphere(2)).cvr == doctest::Approx(kPi / 2));
  CHECK(curvature_bounds(ManifoldTag::euclidean(3)).c0 == 0);
  CHECK(curvature_bounds(ManifoldTag::hyperbolic(2)).c0 == 1);
  CHECK(curvature_bounds(ManifoldTag::hyperbolic(2)).c1 == 0);
  CHECK(std::isinf(curvature_bounds(ManifoldTag::hyperbolic(2)).inj));
  CHECK(curvature_bounds(ManifoldTag::flat_torus(2)).inj == doctest::Approx(0.5));
}

TEST_CASE("cut locus and invariant violations are rejected") {
  Point p = sphere_pt(1, 0, 0);
  CHECK_THROWS_AS(log_map(p, sphere_pt(-1, 0, 0)), cut_locus_error);
  CHECK_THROWS_AS(parallel_transport(p, sphere_pt(-1, 0, 0), make_tangent(p, v3(0, 1, 0))), cut_locus_error);
  CHECK_THROWS_AS(exp_map(p, make_tangent(p, v3(0, 2 * kPi, 0))), cut_locus_error);
  CHECK_THROWS_AS(make_point(ManifoldTag::sphere(2), v3(1, 1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(make_point(ManifoldTag::hyperbolic(2), v3(-1, 0, 0)), std::invalid_argument);
  // tangent based elsewhere
  Tangent stray = make_tangent(sphere_pt(0, 1, 0), v3(1, 0, 0));
  CHECK_THROWS_AS(exp_map(p, stray), tag_mismatch);
}

TEST_CASE("torus cut-locus representative is deterministic") {
  const ManifoldTag t1 = ManifoldTag::flat_torus(1);
  Point z = make_point(t1, (Vec(1) << 0.0).finished());
  Point h = make_point(t1, (Vec(1) << 0.5).finished());
  CHECK(log_map(z, h).v[0] == doctest::Approx(0.5));
  CHECK(log_map(h, z).v[0] == doctest::Approx(0.5));
}

TEST_SUITE_END();
