#pragma once

#include "kc/types.hpp"

namespace kc {

// Symmetric quadrature rule on the standard n-simplex. Nodes are barycentric
// (n+1 coordinates); weights sum to the reference volume 1/n!, so
//   integral over the realized simplex = sum_q w_q * density(node_q)
// once the integrand carries the metric volume density relative to the
// barycentric parametrisation.
struct SimplexQuadrature {
  std::vector<Vec> nodes;
  std::vector<double> weights;
};

// degree: highest polynomial degree integrated exactly. Supported:
// n = 1: degrees 1..5; n = 2: 1, 2, 4, 6; n = 3: 1, 2, 3.
SimplexQuadrature simplex_quadrature(int n, int degree);

}  // namespace kc
