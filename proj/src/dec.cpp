#include "kc/dec.hpp"

#include "kc/quadrature.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <functional>

namespace kc {

namespace {

double binom(int n, int k) {
  double b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

SpMat diag(const Vec& d) {
  SpMat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  std::vector<Triplet> t;
  t.reserve(d.size());
  for (int i = 0; i < d.size(); ++i) t.emplace_back(i, i, d[i]);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

int numerical_rank(const SpMat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Mat dense(m);
  Eigen::JacobiSVD<Mat> svd(dense);
  const Vec s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > 1e-10 * s[0]) ++r;
  return r;
}

// Sorted multi-indices of {0..d-1} with k entries.
std::vector<std::vector<int>> multi_indices(int d, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < d; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

// Components of the unit volume form of the realized simplex with vertex
// positions rows(t) in the coordinate k-form basis (canonical vertex order).
Vec unit_form_components(const Mat& positions, const VertexTuple& t, const std::vector<std::vector<int>>& idx) {
  const int k = static_cast<int>(t.size()) - 1;
  const int d = static_cast<int>(positions.cols());
  Vec comps = Vec::Zero(static_cast<int>(idx.size()));
  if (k == 0) {
    comps[0] = 1.0;
    return comps;
  }
  Mat w(d, k);
  for (int i = 1; i <= k; ++i) w.col(i - 1) = (positions.row(t[i]) - positions.row(t[0])).transpose();
  // Gram-Schmidt, orientation preserving.
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < i; ++j) w.col(i) -= w.col(j).dot(w.col(i)) * w.col(j);
    const double nrm = w.col(i).norm();
    if (nrm < 1e-14) throw degenerate_simplex("degenerate simplex in form evaluation");
    w.col(i) /= nrm;
  }
  for (std::size_t m = 0; m < idx.size(); ++m) {
    Mat sub(k, k);
    for (int r = 0; r < k; ++r) sub.row(r) = w.row(idx[m][r]);
    comps[static_cast<int>(m)] = sub.determinant();
  }
  return comps;
}

// Elementwise coefficient of the piecewise-constant derivative,
// (|t|/|s|) times the incidence sign of t in the boundary of s.
double pc_d_entry(const Complex& c, const DualVolumes& dv, int k, int t_idx, int s_idx) {
  const VertexTuple& t = c.faces[k][t_idx];
  const VertexTuple& s = c.faces[k + 1][s_idx];
  int drop = -1;
  for (int i = 0; i <= k + 1; ++i) {
    VertexTuple f;
    for (int j = 0; j <= k + 1; ++j)
      if (j != i) f.push_back(s[j]);
    if (f == t) {
      drop = i;
      break;
    }
  }
  if (drop < 0) return 0;
  const double sign = (drop % 2 == 0) ? 1.0 : -1.0;
  return sign * dv.primal[k][t_idx] / dv.primal[k + 1][s_idx];
}

}  // namespace

double DecOperators::coch_inner(int k, const Vec& a, const Vec& b) const {
  return (a.array() * b.array() * coch_weight[k].array()).sum();
}

double DecOperators::pc_inner(int k, const Vec& a, const Vec& b) const {
  return (a.array() * b.array() * pc_weight[k].array()).sum();
}

double DecOperators::pc_norm(int k, const Vec& a) const { return std::sqrt(std::max(0.0, pc_inner(k, a, a))); }

DecOperators build_operators(const Complex& c, const DualVolumes& dv) {
  DecOperators ops;
  const int n = c.dim;
  ops.n = n;
  ops.boundary.resize(n + 1);
  for (int k = 1; k <= n; ++k) ops.boundary[k] = boundary_matrix(c, k);

  ops.primal_volume.resize(n + 1);
  ops.coch_weight.resize(n + 1);
  ops.pc_weight.resize(n + 1);
  ops.u_weight.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    const int m = static_cast<int>(c.count(k));
    ops.primal_volume[k].resize(m);
    ops.coch_weight[k].resize(m);
    ops.pc_weight[k].resize(m);
    ops.u_weight[k].resize(m);
    for (int i = 0; i < m; ++i) {
      const double ps = dv.primal[k][i];
      const double us = dv.nbhd[k][i];
      if (us <= 0) throw not_well_centred("zero dual volume");
      ops.primal_volume[k][i] = ps;
      ops.coch_weight[k][i] = dv.dual[k][i] / ps;
      ops.pc_weight[k][i] = binom(n, k) * us;
      ops.u_weight[k][i] = us;
    }
  }

  ops.coch_d.resize(n);
  ops.pc_d.resize(n);
  for (int k = 0; k < n; ++k) {
    ops.coch_d[k] = SpMat(ops.boundary[k + 1].transpose());
    ops.pc_d[k] = diag(ops.primal_volume[k + 1].cwiseInverse()) * ops.coch_d[k] * diag(ops.primal_volume[k]);
  }
  ops.pc_codiff.resize(n + 1);
  for (int k = 1; k <= n; ++k)
    ops.pc_codiff[k] =
        diag(ops.pc_weight[k - 1].cwiseInverse()) * SpMat(ops.pc_d[k - 1].transpose()) * diag(ops.pc_weight[k]);
  return ops;
}

Vec cochain_to_pc(const DecOperators& ops, int k, const Vec& cochain) {
  return cochain.cwiseQuotient(ops.primal_volume[k]);
}

std::pair<double, double> stokes_check(const DecOperators& ops, const Complex& c, int k, const Vec& alpha,
                                       int s_index) {
  if (k < 0 || k >= ops.n) throw std::invalid_argument("stokes degree out of range");
  if (s_index < 0 || s_index >= static_cast<int>(c.count(k + 1)))
    throw std::invalid_argument("simplex index out of range");
  const Vec d_alpha = ops.pc_d[k] * alpha;
  const double lhs = d_alpha[s_index] * ops.primal_volume[k + 1][s_index];
  double rhs = 0;
  for (SpMat::InnerIterator it(ops.boundary[k + 1], s_index); it; ++it)
    rhs += it.value() * alpha[it.row()] * ops.primal_volume[k][it.row()];
  return {lhs, rhs};
}

ProjectionResult project_to_pc(const FormSampler& form, const FormSampler& derivative, int degree,
                               const Complex& c, const DualVolumes& dv, const Embedding& emb,
                               int quad_degree) {
  const int n = c.dim;
  const int k = degree;
  if (k < 0 || k > n) throw std::invalid_argument("projection degree out of range");
  const int d = static_cast<int>(emb.positions.cols());
  if (d != n) throw std::invalid_argument("projection needs a full-dimensional embedding");

  const auto idx_k = multi_indices(d, k);
  const auto idx_k1 = multi_indices(d, k + 1);
  const SimplexQuadrature quad = simplex_quadrature(n, quad_degree);
  const double nfact = [&] {
    double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  }();

  ProjectionResult res;
  res.coefficients = Vec::Zero(static_cast<int>(c.count(k)));
  res.min_singular = std::numeric_limits<double>::infinity();
  Vec accumulated_weight = Vec::Zero(static_cast<int>(c.count(k)));

  for (std::size_t e = 0; e < c.count(n); ++e) {
    const VertexTuple& ev = c.faces[n][e];
    const std::vector<int> faces_k = c.element_faces(static_cast<int>(e), k);
    const std::vector<int> faces_k1 = k < n ? c.element_faces(static_cast<int>(e), k + 1) : std::vector<int>{};
    const int unknowns = static_cast<int>(faces_k.size());
    const int rows = static_cast<int>(idx_k.size() + idx_k1.size());
    if (rows != unknowns) throw rank_deficient("moment system is not square");

    const double evol = dv.primal[n][e];
    // Quadrature of the sampled form over the element.
    Vec rhs_f = Vec::Zero(static_cast<int>(idx_k.size()));
    Vec rhs_df = Vec::Zero(static_cast<int>(idx_k1.size()));
    for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
      Vec x = Vec::Zero(d);
      for (int i = 0; i <= n; ++i) x += quad.nodes[q][i] * emb.positions.row(ev[i]).transpose();
      const double w = quad.weights[q] * nfact * evol;
      rhs_f += w * form(x);
      if (k < n) rhs_df += w * derivative(x);
    }

    Mat a = Mat::Zero(rows, unknowns);
    for (int u = 0; u < unknowns; ++u) {
      const int t_idx = faces_k[u];
      const VertexTuple& t = c.faces[k][t_idx];
      const double cap = dv.nbhd_in_element[k].at({t_idx, static_cast<int>(e)});
      const Vec comp_t = unit_form_components(emb.positions, t, idx_k);
      for (std::size_t m = 0; m < idx_k.size(); ++m) a(static_cast<int>(m), u) = cap * comp_t[static_cast<int>(m)];
      if (k < n) {
        for (int s_local = 0; s_local < static_cast<int>(faces_k1.size()); ++s_local) {
          const int s_idx = faces_k1[s_local];
          const double dcoef = pc_d_entry(c, dv, k, t_idx, s_idx);
          if (dcoef == 0) continue;
          const double cap_s = dv.nbhd_in_element[k + 1].at({s_idx, static_cast<int>(e)});
          const Vec comp_s = unit_form_components(emb.positions, c.faces[k + 1][s_idx], idx_k1);
          for (std::size_t m = 0; m < idx_k1.size(); ++m)
            a(static_cast<int>(idx_k.size() + m), u) += dcoef * cap_s * comp_s[static_cast<int>(m)];
        }
      }
    }

    Vec rhs(rows);
    rhs.head(idx_k.size()) = rhs_f;
    if (k < n) rhs.tail(idx_k1.size()) = rhs_df;

    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec sv = svd.singularValues();
    const double smin = sv[sv.size() - 1], smax = sv[0];
    res.min_singular = std::min(res.min_singular, smin);
    res.max_condition = std::max(res.max_condition, smax / std::max(smin, 1e-300));
    if (smin < 1e-10 * smax) throw rank_deficient("element moment system is rank deficient");
    Vec local = svd.solve(rhs);

    for (int u = 0; u < unknowns; ++u) {
      const int t_idx = faces_k[u];
      const double cap = dv.nbhd_in_element[k].at({t_idx, static_cast<int>(e)});
      res.coefficients[t_idx] += cap * local[u];
      accumulated_weight[t_idx] += cap;
    }
  }
  res.coefficients.array() /= accumulated_weight.array();
  return res;
}

Vec poisson_pc(const DecOperators& ops, const Vec& f_vertex, const DirichletBC* bc) {
  const int nv = static_cast<int>(ops.primal_volume[0].size());
  const SpMat k_mat = SpMat(ops.pc_d[0].transpose()) * diag(ops.pc_weight[1]) * ops.pc_d[0];
  const Vec rhs_full = ops.pc_weight[0].cwiseProduct(f_vertex);

  if (bc && !bc->vertices.empty()) {
    std::vector<int> place(nv, -1);
    std::vector<int> free_ids;
    std::vector<char> fixed(nv, 0);
    Vec full = Vec::Zero(nv);
    for (std::size_t i = 0; i < bc->vertices.size(); ++i) {
      fixed[bc->vertices[i]] = 1;
      full[bc->vertices[i]] = bc->values[static_cast<int>(i)];
    }
    for (int v = 0; v < nv; ++v)
      if (!fixed[v]) {
        place[v] = static_cast<int>(free_ids.size());
        free_ids.push_back(v);
      }
    const int nf = static_cast<int>(free_ids.size());
    std::vector<Triplet> trips;
    Vec rhs = Vec::Zero(nf);
    for (int v : free_ids) rhs[place[v]] = rhs_full[v];
    for (int col = 0; col < k_mat.outerSize(); ++col)
      for (SpMat::InnerIterator it(k_mat, col); it; ++it) {
        const int r = static_cast<int>(it.row()), cc = static_cast<int>(it.col());
        if (fixed[r]) continue;
        if (fixed[cc])
          rhs[place[r]] -= it.value() * full[cc];
        else
          trips.emplace_back(place[r], place[cc], it.value());
      }
    SpMat kf(nf, nf);
    kf.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<SpMat> solver(kf);
    if (solver.info() != Eigen::Success) throw solver_error("Poisson factorization failed");
    Vec uf = solver.solve(rhs);
    for (int i = 0; i < nf; ++i) full[free_ids[i]] = uf[i];
    return full;
  }

  // Closed complex: mean-zero gauge via one multiplier row.
  const Vec w = ops.pc_weight[0];
  if (std::abs(rhs_full.sum()) > 1e-8 * std::max(1.0, rhs_full.cwiseAbs().maxCoeff() * w.sum()))
    throw std::invalid_argument("incompatible data: <f,1> != 0 on a closed complex");
  SpMat big(nv + 1, nv + 1);
  std::vector<Triplet> trips;
  for (int col = 0; col < k_mat.outerSize(); ++col)
    for (SpMat::InnerIterator it(k_mat, col); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int v = 0; v < nv; ++v) {
    trips.emplace_back(v, nv, w[v]);
    trips.emplace_back(nv, v, w[v]);
  }
  big.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<SpMat> solver(big);
  if (solver.info() != Eigen::Success) throw solver_error("gauged Poisson factorization failed");
  Vec rhs = Vec::Zero(nv + 1);
  rhs.head(nv) = rhs_full;
  Vec sol = solver.solve(rhs);
  if ((big * sol - rhs).norm() > 1e-10 * std::max(1.0, rhs.norm()))
    throw solver_error("singular system beyond the constant kernel");
  return sol.head(nv);
}

HodgeParts hodge_pc(const DecOperators& ops, int k, const Vec& u) {
  const int n = ops.n;
  HodgeParts parts;
  const Vec sqrt_w = ops.pc_weight[k].cwiseSqrt();

  if (k >= 1) {
    Mat a = Mat(ops.pc_d[k - 1]);
    a.array().colwise() *= sqrt_w.array();
    Vec b = u.cwiseProduct(sqrt_w);
    parts.potential_a = a.completeOrthogonalDecomposition().solve(b);
    parts.exact = ops.pc_d[k - 1] * parts.potential_a;
  } else {
    parts.potential_a = Vec::Zero(0);
    parts.exact = Vec::Zero(u.size());
  }
  if (k < n) {
    Mat a = Mat(ops.pc_codiff[k + 1]);
    a.array().colwise() *= sqrt_w.array();
    Vec b = u.cwiseProduct(sqrt_w);
    parts.potential_b = a.completeOrthogonalDecomposition().solve(b);
    parts.coexact = ops.pc_codiff[k + 1] * parts.potential_b;
  } else {
    parts.potential_b = Vec::Zero(0);
    parts.coexact = Vec::Zero(u.size());
  }
  parts.harmonic = u - parts.exact - parts.coexact;
  return parts;
}

int harmonic_dimension(const DecOperators& ops, int k) {
  const int n = ops.n;
  const int dim_k = static_cast<int>(ops.primal_volume[k].size());
  const int rank_up = k < n ? numerical_rank(ops.pc_d[k]) : 0;
  const int rank_down = k >= 1 ? numerical_rank(ops.pc_d[k - 1]) : 0;
  return dim_k - rank_up - rank_down;
}

double dirichlet_energy_pc(const DecOperators& ops, const Complex& c, const DualVolumes& dv, int degree,
                           const Vec& form, const std::vector<int>& region) {
  Vec g = form;
  int deg = degree;
  if (degree == 0) {
    g = ops.pc_d[0] * form;
    deg = 1;
  }
  double energy = 0;
  for (std::size_t s = 0; s < c.count(deg); ++s) {
    double measure = 0;
    for (int e : region) {
      auto it = dv.nbhd_in_element[deg].find({static_cast<int>(s), e});
      if (it != dv.nbhd_in_element[deg].end()) measure += it->second;
    }
    energy += g[static_cast<int>(s)] * g[static_cast<int>(s)] * measure;
  }
  return energy;
}

}  // namespace kc
