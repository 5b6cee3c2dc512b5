#pragma once

#include "kc/types.hpp"

namespace kc {

// Edge lengths of an n-simplex: symmetric (n+1)x(n+1), zero diagonal.
struct EdgeLengths {
  Mat l;

  int order() const { return static_cast<int>(l.rows()) - 1; }
  double max_edge() const;

  static EdgeLengths from_matrix(Mat m);
  // Convenience for triangles: lengths (l01, l02, l12).
  static EdgeLengths triangle(double l01, double l02, double l12);
  // Lengths from explicit vertex coordinates (columns or rows = points).
  static EdgeLengths from_points(const Mat& points_rows);
};

// Volume of the regular unit-edge n-simplex, sqrt(n+1)/(2^{n/2} n!).
double regular_simplex_volume(int n);
// Lower eigenvalue constant n! * sigma_n * n^{1-n}.
double gram_eigen_lower_const(int n);

// C_ij = (l_0i^2 + l_0j^2 - l_ij^2)/2, i,j = 1..n.
Mat gram_from_lengths(const EdgeLengths& el);

// Tangent metric on the standard simplex: E_ij = -l_ij^2 / 2, acting on
// mean-zero vectors. Inner product of u,v with u.sum() = v.sum() = 0 is
// u^T E v.
Mat metric_form(const EdgeLengths& el);

// Bordered matrix [[0, -1/2 1^T], [-1/2 1, E]]; volume = 2/n! sqrt(-det).
Mat cayley_menger(const EdgeLengths& el);

// Throws invalid_metric when the lengths are not realizable.
double volume(const EdgeLengths& el);
// Same value through the Gram determinant, (det C)^{1/2}/n!.
double volume_via_gram(const EdgeLengths& el);

// vol / (h^n sigma_n). Requires h >= max edge.
double fullness(const EdgeLengths& el, double h);

bool is_degenerate(const EdgeLengths& el);

struct Circumdata {
  double radius = 0;
  Vec barycentric;  // circumcentre, sums to 1
  Mat cotangent;    // (n+1)x(n+1) dual metric, zero row/column sums
};

// Block structure of the inverse bordered matrix. Throws degenerate_simplex.
Circumdata circumdata(const EdgeLengths& el);

// cot of the triangle angle at the vertex opposite edge (i,j), from lengths.
double cotan_weight(const EdgeLengths& tri, int i, int j);

struct SimplexReport {
  double volume = 0;
  double fullness = 0;
  double diameter = 0;
  double circumradius = 0;
  bool degenerate = false;
  Vec circumcentre;
  Mat cotangent;
};

SimplexReport analyze(const EdgeLengths& el);

// True when lbar is realizable and the metric deviation |(g - gbar)(v,v)|
// stays below eps |v|_g^2 on a probe basis of tangents.
bool perturb_lengths_check(const EdgeLengths& l, const EdgeLengths& lbar, double eps);

}  // namespace kc
