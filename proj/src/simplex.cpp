#include "kc/simplex.hpp"

#include <cmath>

namespace kc {

namespace {

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

double regular_simplex_volume(int n) {
  return std::sqrt(n + 1.0) / (std::pow(2.0, n / 2.0) * factorial(n));
}

double gram_eigen_lower_const(int n) {
  return factorial(n) * regular_simplex_volume(n) * std::pow(double(n), 1.0 - n);
}

double EdgeLengths::max_edge() const { return l.maxCoeff(); }

EdgeLengths EdgeLengths::from_matrix(Mat m) {
  if (m.rows() != m.cols() || m.rows() < 2) throw std::invalid_argument("edge length matrix must be square, order >= 1");
  for (int i = 0; i < m.rows(); ++i) {
    if (m(i, i) != 0) throw std::invalid_argument("edge length diagonal must vanish");
    for (int j = 0; j < i; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > 1e-14 * std::max(1.0, std::abs(m(i, j))))
        throw std::invalid_argument("edge lengths must be symmetric");
      if (m(i, j) < 0) throw std::invalid_argument("edge lengths must be nonnegative");
      m(j, i) = m(i, j);
    }
  }
  return EdgeLengths{std::move(m)};
}

EdgeLengths EdgeLengths::triangle(double l01, double l02, double l12) {
  Mat m = Mat::Zero(3, 3);
  m(0, 1) = m(1, 0) = l01;
  m(0, 2) = m(2, 0) = l02;
  m(1, 2) = m(2, 1) = l12;
  return from_matrix(std::move(m));
}

EdgeLengths EdgeLengths::from_points(const Mat& pts) {
  const int k = static_cast<int>(pts.rows());
  Mat m = Mat::Zero(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) m(i, j) = m(j, i) = (pts.row(i) - pts.row(j)).norm();
  return EdgeLengths{std::move(m)};
}

Mat gram_from_lengths(const EdgeLengths& el) {
  const int n = el.order();
  Mat c(n, n);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      double a = el.l(0, i), b = el.l(0, j), d = el.l(i, j);
      c(i - 1, j - 1) = 0.5 * (a * a + b * b - d * d);
    }
  return c;
}

Mat metric_form(const EdgeLengths& el) {
  return -0.5 * el.l.array().square().matrix();
}

Mat cayley_menger(const EdgeLengths& el) {
  const int n = el.order();
  Mat m = Mat::Zero(n + 2, n + 2);
  m.block(1, 1, n + 1, n + 1) = metric_form(el);
  for (int i = 1; i <= n + 1; ++i) m(0, i) = m(i, 0) = -0.5;
  return m;
}

double volume(const EdgeLengths& el) {
  const int n = el.order();
  const double h = el.max_edge();
  const double disc = -cayley_menger(el).determinant();
  const double scale = std::pow(std::max(h, 1e-150), 2 * n + 2);
  if (disc < -1e-12 * std::max(scale, 1e-300))
    throw invalid_metric("edge lengths are not a discrete metric (negative Cayley-Menger discriminant)");
  return 2.0 / factorial(n) * std::sqrt(std::max(0.0, disc));
}

double volume_via_gram(const EdgeLengths& el) {
  const double d = gram_from_lengths(el).determinant();
  return std::sqrt(std::max(0.0, d)) / factorial(el.order());
}

double fullness(const EdgeLengths& el, double h) {
  const int n = el.order();
  if (h < el.max_edge() * (1 - 1e-12)) throw std::invalid_argument("fullness requires h >= max edge length");
  if (h <= 0) throw std::invalid_argument("fullness requires h > 0");
  return volume(el) / (std::pow(h, n) * regular_simplex_volume(n));
}

bool is_degenerate(const EdgeLengths& el) {
  const int n = el.order();
  const double h = el.max_edge();
  if (h == 0) return true;
  return volume(el) < 1e-12 * std::pow(h, n);
}

Circumdata circumdata(const EdgeLengths& el) {
  if (is_degenerate(el)) throw degenerate_simplex("no circumdata for a degenerate simplex");
  const int n = el.order();
  Mat m = cayley_menger(el);
  Mat inv = m.partialPivLu().inverse();
  Circumdata cd;
  cd.radius = 0.5 * std::sqrt(std::max(0.0, inv(0, 0)));
  cd.barycentric = -0.5 * inv.block(0, 1, 1, n + 1).transpose();
  cd.cotangent = 0.5 * (inv.block(1, 1, n + 1, n + 1) + inv.block(1, 1, n + 1, n + 1).transpose());
  return cd;
}

double cotan_weight(const EdgeLengths& tri, int i, int j) {
  if (tri.order() != 2) throw std::invalid_argument("cotan_weight needs a triangle");
  if (i == j || i < 0 || j < 0 || i > 2 || j > 2) throw std::invalid_argument("bad edge indices");
  const int k = 3 - i - j;
  const double a = tri.l(i, k), b = tri.l(j, k), c = tri.l(i, j);
  const double area = volume(tri);
  if (area < 1e-14 * tri.max_edge() * tri.max_edge())
    throw degenerate_simplex("cotan weight of a degenerate triangle");
  return (a * a + b * b - c * c) / (4.0 * area);
}

SimplexReport analyze(const EdgeLengths& el) {
  SimplexReport r;
  r.volume = volume(el);
  r.diameter = el.max_edge();
  r.fullness = r.diameter > 0 ? fullness(el, r.diameter) : 0;
  r.degenerate = is_degenerate(el);
  if (!r.degenerate) {
    Circumdata cd = circumdata(el);
    r.circumradius = cd.radius;
    r.circumcentre = cd.barycentric;
    r.cotangent = cd.cotangent;
  }
  return r;
}

bool perturb_lengths_check(const EdgeLengths& l, const EdgeLengths& lbar, double eps) {
  const int n = l.order();
  if (lbar.order() != n) throw std::invalid_argument("length systems must have equal order");

  Mat c = gram_from_lengths(lbar);
  Eigen::SelfAdjointEigenSolver<Mat> es(c);
  const double scale = std::max(1e-300, c.cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-12 * scale) return false;  // not realizable

  const Mat e = metric_form(l);
  const Mat ebar = metric_form(lbar);
  // Probes: all edge directions of the standard simplex plus sums of pairs.
  std::vector<Vec> probes;
  for (int i = 0; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      Vec v = Vec::Zero(n + 1);
      v[i] = 1;
      v[j] = -1;
      probes.push_back(v);
      if (j + 1 <= n) {
        Vec w = Vec::Zero(n + 1);
        w[i] = 2;
        w[j] = -1;
        w[j + 1] = -1;
        probes.push_back(w);
      }
    }
  for (const Vec& v : probes) {
    const double g = v.dot(e * v);
    const double gbar = v.dot(ebar * v);
    if (std::abs(g - gbar) > eps * g + 1e-14) return false;
  }
  return true;
}

}  // namespace kc
