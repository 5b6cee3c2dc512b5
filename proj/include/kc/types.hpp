#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>

namespace kc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Two objects live on different manifolds (or a tangent has the wrong base).
struct tag_mismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A map was evaluated at or beyond the cut locus.
struct cut_locus_error : std::domain_error {
  using std::domain_error::domain_error;
};

struct solver_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct irregular_complex : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Edge lengths that do not define a discrete Riemannian metric.
struct invalid_metric : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct degenerate_simplex : std::domain_error {
  using std::domain_error::domain_error;
};

// Some circumcentre lies on or outside its simplex.
struct not_well_centred : std::domain_error {
  using std::domain_error::domain_error;
};

// Vertex configuration whose Voronoi structure is not a regular complex.
struct non_generic : std::domain_error {
  using std::domain_error::domain_error;
};

struct rank_deficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kc
