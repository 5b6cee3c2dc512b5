#pragma once

#include "kc/complex.hpp"

#include <functional>

namespace kc {

// Operators of the cochain calculus and its piecewise-constant realization.
//
// Cochains C^k carry the diagonal product <f^s, f^s> = |*s|/|s|; the
// piecewise-constant forms carry <w^s, w^s> = binom(n,k) |U(s)|, which makes
// the interpolation f^s -> w^s / |s| an isometry and a (co)chain map. The
// plain |U(s)| weights are kept alongside for L2 bookkeeping of individual
// forms.
struct DecOperators {
  int n = 0;
  std::vector<SpMat> boundary;      // boundary[k]: #K^{k-1} x #K^k, k = 1..n
  std::vector<SpMat> coch_d;        // coch_d[k]: C^k -> C^{k+1}, k = 0..n-1
  std::vector<SpMat> pc_d;          // pc_d[k]: Omega^k -> Omega^{k+1}
  std::vector<SpMat> pc_codiff;     // pc_codiff[k]: Omega^k -> Omega^{k-1}, k = 1..n
  std::vector<Vec> coch_weight;     // |*s|/|s| per k-simplex
  std::vector<Vec> pc_weight;       // binom(n,k) |U(s)|
  std::vector<Vec> u_weight;        // |U(s)|
  std::vector<Vec> primal_volume;   // |s| (1 for vertices)

  double coch_inner(int k, const Vec& a, const Vec& b) const;
  double pc_inner(int k, const Vec& a, const Vec& b) const;
  double pc_norm(int k, const Vec& a) const;
};

DecOperators build_operators(const Complex& c, const DualVolumes& dv);

// The interpolation i_k, coefficientwise alpha_s / |s|.
Vec cochain_to_pc(const DecOperators& ops, int k, const Vec& cochain);

// Integral of pc_d(alpha) over the realized simplex s versus the boundary
// integral of alpha; the two agree for every piecewise-constant form.
std::pair<double, double> stokes_check(const DecOperators& ops, const Complex& c, int k, const Vec& alpha,
                                       int s_index);

// Planar embedding used to evaluate smooth forms on realized elements.
struct Embedding {
  Mat positions;  // #V x d
};

// A k-form sampler: maps a position to the form's components in the fixed
// coordinate frame (size 1 for k=0, d for k=1, binom(d,k) in general,
// components ordered by increasing multi-index).
using FormSampler = std::function<Vec(const Vec&)>;

struct ProjectionResult {
  Vec coefficients;          // per k-simplex, canonical orientation
  double min_singular = 0;   // smallest singular value across element systems
  double max_condition = 0;  // largest condition number
};

// Elementwise moment fit of a smooth k-form (matching means against all
// constant k-forms and the derivative means against constant (k+1)-forms),
// then neighbourhood averaging. Throws rank_deficient when an element's
// moment system is singular.
ProjectionResult project_to_pc(const FormSampler& form, const FormSampler& derivative, int degree,
                               const Complex& c, const DualVolumes& dv, const Embedding& emb,
                               int quad_degree = 4);

struct DirichletBC {
  std::vector<int> vertices;
  Vec values;
};

// Degree-0 variational Poisson solve: Dirichlet values on the listed
// vertices, or the mean-zero gauge on a closed complex (requires
// <f, 1> = 0).
Vec poisson_pc(const DecOperators& ops, const Vec& f_vertex, const DirichletBC* bc = nullptr);

struct HodgeParts {
  Vec exact;      // pc_d a
  Vec coexact;    // pc_codiff b
  Vec harmonic;   // u - exact - coexact
  Vec potential_a;
  Vec potential_b;
};

HodgeParts hodge_pc(const DecOperators& ops, int k, const Vec& u);

// dim ker pc_d_k  -  rank pc_d_{k-1} via numerical ranks.
int harmonic_dimension(const DecOperators& ops, int k);

// |U|-weighted squared coefficients of a degree-k form over a set of
// elements; a degree-0 argument is differentiated first.
double dirichlet_energy_pc(const DecOperators& ops, const Complex& c, const DualVolumes& dv, int degree,
                           const Vec& form, const std::vector<int>& region);

}  // namespace kc
