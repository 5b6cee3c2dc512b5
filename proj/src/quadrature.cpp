#include "kc/quadrature.hpp"

#include <cmath>

namespace kc {

namespace {

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void push(SimplexQuadrature& q, std::initializer_list<double> bary, double w) {
  Vec v(static_cast<int>(bary.size()));
  int i = 0;
  for (double b : bary) v[i++] = b;
  q.nodes.push_back(std::move(v));
  q.weights.push_back(w);
}

// All distinct permutations of a barycentric pattern, each with weight w.
void push_orbit(SimplexQuadrature& q, std::vector<double> bary, double w) {
  std::sort(bary.begin(), bary.end());
  do {
    Vec v(static_cast<int>(bary.size()));
    for (std::size_t i = 0; i < bary.size(); ++i) v[static_cast<int>(i)] = bary[i];
    q.nodes.push_back(std::move(v));
    q.weights.push_back(w);
  } while (std::next_permutation(bary.begin(), bary.end()));
}

}  // namespace

SimplexQuadrature simplex_quadrature(int n, int degree) {
  SimplexQuadrature q;
  const double vol = 1.0 / factorial(n);
  if (n == 1) {
    if (degree <= 1) {
      push(q, {0.5, 0.5}, vol);
    } else if (degree <= 3) {
      const double a = 0.5 - 0.5 / std::sqrt(3.0);
      push(q, {a, 1 - a}, vol / 2);
      push(q, {1 - a, a}, vol / 2);
    } else {
      const double a = 0.5 - 0.5 * std::sqrt(3.0 / 5.0);
      push(q, {a, 1 - a}, vol * 5.0 / 18.0);
      push(q, {1 - a, a}, vol * 5.0 / 18.0);
      push(q, {0.5, 0.5}, vol * 8.0 / 18.0);
    }
  } else if (n == 2) {
    if (degree <= 1) {
      push(q, {1.0 / 3, 1.0 / 3, 1.0 / 3}, vol);
    } else if (degree <= 2) {
      push_orbit(q, {2.0 / 3, 1.0 / 6, 1.0 / 6}, vol / 3);
    } else if (degree <= 4) {
      // Dunavant degree-4, 6 points.
      const double w1 = 0.223381589678011, a1 = 0.445948490915965;
      const double w2 = 0.109951743655322, a2 = 0.091576213509771;
      push_orbit(q, {1 - 2 * a1, a1, a1}, vol * w1);
      push_orbit(q, {1 - 2 * a2, a2, a2}, vol * w2);
    } else {
      // Dunavant degree-6, 12 points.
      const double w1 = 0.116786275726379, a1 = 0.249286745170910;
      const double w2 = 0.050844906370207, a2 = 0.063089014491502;
      const double w3 = 0.082851075618374, a3 = 0.310352451033785, b3 = 0.053145049844816;
      push_orbit(q, {1 - 2 * a1, a1, a1}, vol * w1);
      push_orbit(q, {1 - 2 * a2, a2, a2}, vol * w2);
      push_orbit(q, {1 - a3 - b3, a3, b3}, vol * w3);
    }
  } else if (n == 3) {
    if (degree <= 1) {
      push(q, {0.25, 0.25, 0.25, 0.25}, vol);
    } else if (degree <= 2) {
      const double a = (5.0 - std::sqrt(5.0)) / 20.0;
      const double b = 1.0 - 3 * a;
      push_orbit(q, {b, a, a, a}, vol / 4);
    } else {
      // Keast degree-3, 5 points (one negative weight).
      push(q, {0.25, 0.25, 0.25, 0.25}, vol * (-0.8));
      push_orbit(q, {0.5, 1.0 / 6, 1.0 / 6, 1.0 / 6}, vol * 0.45);
    }
  } else {
    throw std::invalid_argument("quadrature supports n in {1,2,3}");
  }
  return q;
}

}  // namespace kc
