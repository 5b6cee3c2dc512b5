#include "kc/complex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

namespace kc {

namespace {

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

int sort_sign(VertexTuple& t) {
  // Parity of the permutation that sorts t; 0 if a vertex repeats.
  int sign = 1;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      if (t[i] == t[j]) return 0;
      if (t[i] > t[j]) {
        std::swap(t[i], t[j]);
        sign = -sign;
      }
    }
  return sign;
}

void subsets_rec(const VertexTuple& base, int k, std::size_t start, VertexTuple& cur,
                 const std::function<void(const VertexTuple&)>& emit) {
  if (static_cast<int>(cur.size()) == k + 1) {
    emit(cur);
    return;
  }
  for (std::size_t i = start; i < base.size(); ++i) {
    cur.push_back(base[i]);
    subsets_rec(base, k, i + 1, cur, emit);
    cur.pop_back();
  }
}

void for_each_subset(const VertexTuple& base, int k, const std::function<void(const VertexTuple&)>& emit) {
  VertexTuple cur;
  subsets_rec(base, k, 0, cur, emit);
}

bool tuple_contains(const VertexTuple& big, const VertexTuple& small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace

int Complex::simplex_index(int k, VertexTuple t) const {
  std::sort(t.begin(), t.end());
  auto it = index_[k].find(t);
  return it == index_[k].end() ? -1 : it->second;
}

int Complex::edge_index(int a, int b) const {
  if (a > b) std::swap(a, b);
  return simplex_index(1, {a, b});
}

std::vector<int> Complex::element_faces(int e, int k) const {
  std::vector<int> out;
  for_each_subset(faces[dim][e], k, [&](const VertexTuple& t) {
    out.push_back(index_[k].at(t));
  });
  return out;
}

bool Complex::has_boundary() const {
  return std::any_of(facet_on_boundary.begin(), facet_on_boundary.end(), [](char b) { return b != 0; });
}

bool Complex::is_connected() const {
  if (vertex_count == 0) return false;
  std::vector<char> seen(vertex_count, 0);
  std::vector<int> stack{faces[0][0][0]};
  seen[stack[0]] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (const auto& e : faces[1]) {
      int o = e[0] == v ? e[1] : (e[1] == v ? e[0] : -1);
      if (o >= 0 && !seen[o]) {
        seen[o] = 1;
        stack.push_back(o);
      }
    }
  }
  for (const auto& v : faces[0])
    if (!seen[v[0]]) return false;
  return true;
}

Complex build_complex(const std::vector<VertexTuple>& elements) {
  if (elements.empty()) throw irregular_complex("complex needs at least one element");
  const int n = static_cast<int>(elements[0].size()) - 1;
  if (n < 1) throw irregular_complex("elements must have dimension >= 1");

  Complex c;
  c.dim = n;
  c.faces.resize(n + 1);
  c.index_.resize(n + 1);

  std::set<VertexTuple> element_sets;
  std::vector<VertexTuple> sorted_elements;
  for (const VertexTuple& raw : elements) {
    if (static_cast<int>(raw.size()) != n + 1) throw irregular_complex("elements of mixed dimension");
    VertexTuple t = raw;
    int sign = sort_sign(t);
    if (sign == 0) throw irregular_complex("element repeats a vertex");
    for (int v : t)
      if (v < 0) throw irregular_complex("negative vertex id");
    if (!element_sets.insert(t).second) throw irregular_complex("two elements share all vertices");
    sorted_elements.push_back(std::move(t));
    c.element_sign.push_back(sign);
  }

  // Collect faces of every dimension with deterministic lexicographic order.
  for (int k = 0; k <= n; ++k) {
    std::set<VertexTuple> keys;
    for (const VertexTuple& e : sorted_elements)
      for_each_subset(e, k, [&](const VertexTuple& t) { keys.insert(t); });
    for (const VertexTuple& t : keys) {
      c.index_[k].emplace(t, static_cast<int>(c.faces[k].size()));
      c.faces[k].push_back(t);
    }
  }
  // Restore elements in input order (faces[n] above is sorted; keep both views
  // consistent by re-pointing faces[n] at the input order).
  c.faces[n] = sorted_elements;
  c.index_[n].clear();
  for (std::size_t i = 0; i < sorted_elements.size(); ++i)
    c.index_[n].emplace(sorted_elements[i], static_cast<int>(i));
  if (c.index_[n].size() != sorted_elements.size()) throw irregular_complex("duplicate elements");

  c.vertex_count = 0;
  for (const auto& v : c.faces[0]) c.vertex_count = std::max(c.vertex_count, v[0] + 1);

  // Facet incidence and boundary flags.
  c.facet_elements.resize(c.faces[n - 1].size());
  for (std::size_t e = 0; e < sorted_elements.size(); ++e) {
    const VertexTuple& t = sorted_elements[e];
    for (int drop = 0; drop <= n; ++drop) {
      VertexTuple f;
      f.reserve(n);
      for (int i = 0; i <= n; ++i)
        if (i != drop) f.push_back(t[i]);
      const int fi = c.index_[n - 1].at(f);
      const int induced = c.element_sign[e] * ((drop % 2 == 0) ? 1 : -1);
      c.facet_elements[fi].emplace_back(static_cast<int>(e), induced);
    }
  }
  c.facet_on_boundary.resize(c.faces[n - 1].size(), 0);
  for (std::size_t f = 0; f < c.facet_elements.size(); ++f) {
    const std::size_t deg = c.facet_elements[f].size();
    if (deg > 2) throw irregular_complex("facet contained in more than two elements");
    c.facet_on_boundary[f] = (deg == 1);
  }
  return c;
}

bool check_orientation(const Complex& c) {
  for (const auto& incident : c.facet_elements) {
    if (incident.size() != 2) continue;
    if (incident[0].second == incident[1].second) return false;
  }
  return true;
}

SpMat boundary_matrix(const Complex& c, int k) {
  if (k < 1 || k > c.dim) throw std::invalid_argument("boundary degree out of range");
  SpMat b(static_cast<int>(c.count(k - 1)), static_cast<int>(c.count(k)));
  std::vector<Triplet> trips;
  for (std::size_t s = 0; s < c.count(k); ++s) {
    const VertexTuple& t = c.faces[k][s];
    for (int drop = 0; drop <= k; ++drop) {
      VertexTuple f;
      for (int i = 0; i <= k; ++i)
        if (i != drop) f.push_back(t[i]);
      const int fi = c.simplex_index(k - 1, std::move(f));
      trips.emplace_back(fi, static_cast<int>(s), (drop % 2 == 0) ? 1.0 : -1.0);
    }
  }
  b.setFromTriplets(trips.begin(), trips.end());
  return b;
}

DiscreteMetric uniform_metric(const Complex& c, double length) {
  return DiscreteMetric{std::vector<double>(c.count(1), length)};
}

DiscreteMetric metric_from(const Complex& c, const std::function<double(int, int)>& len) {
  DiscreteMetric m;
  m.edge_length.reserve(c.count(1));
  for (const auto& e : c.faces[1]) m.edge_length.push_back(len(e[0], e[1]));
  return m;
}

EdgeLengths simplex_lengths(const Complex& c, const DiscreteMetric& m, int k, int idx) {
  const VertexTuple& t = c.faces[k][idx];
  Mat l = Mat::Zero(k + 1, k + 1);
  for (int i = 0; i <= k; ++i)
    for (int j = i + 1; j <= k; ++j) {
      const int ei = c.edge_index(t[i], t[j]);
      if (ei < 0) throw std::invalid_argument("edge missing from complex");
      l(i, j) = l(j, i) = m.edge_length[ei];
    }
  return EdgeLengths{std::move(l)};
}

MetricReport validate_metric(const Complex& c, const DiscreteMetric& m) {
  MetricReport rep;
  if (m.edge_length.size() != c.count(1)) throw std::invalid_argument("metric size mismatch");
  rep.mesh_size = *std::max_element(m.edge_length.begin(), m.edge_length.end());
  rep.min_fullness = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < c.count(c.dim); ++e) {
    MetricElementReport er;
    EdgeLengths el = simplex_lengths(c, m, c.dim, static_cast<int>(e));
    Mat g = gram_from_lengths(el);
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    const double scale = std::max(1e-300, g.cwiseAbs().maxCoeff());
    er.positive_semidefinite = es.eigenvalues().minCoeff() >= -1e-12 * scale;
    if (er.positive_semidefinite) {
      er.volume = volume(el);
      er.fullness = fullness(el, el.max_edge());
    } else {
      rep.valid = false;
    }
    rep.min_fullness = std::min(rep.min_fullness, er.fullness);
    rep.elements.push_back(er);
  }
  if (!rep.valid) rep.min_fullness = 0;
  return rep;
}

namespace {

// Pads the barycentric centre of a sub-simplex onto the coordinates of the
// element tuple.
Vec pad_centre(const VertexTuple& sub, const Vec& centre, const VertexTuple& element) {
  Vec out = Vec::Zero(element.size());
  for (std::size_t i = 0; i < sub.size(); ++i) {
    auto it = std::lower_bound(element.begin(), element.end(), sub[i]);
    out[std::distance(element.begin(), it)] = centre[i];
  }
  return out;
}

}  // namespace

Subdivision subdivide(const Complex& c, const DiscreteMetric& m) {
  const int n = c.dim;
  Subdivision sub;
  sub.centre.resize(n + 1);
  sub.centre[0].assign(c.count(0), Vec::Ones(1));
  for (int k = 1; k <= n; ++k) {
    sub.centre[k].reserve(c.count(k));
    for (std::size_t i = 0; i < c.count(k); ++i) {
      EdgeLengths el = simplex_lengths(c, m, k, static_cast<int>(i));
      if (is_degenerate(el)) throw degenerate_simplex("degenerate simplex in subdivision");
      sub.centre[k].push_back(circumdata(el).barycentric);
    }
  }
  sub.element_form.reserve(c.count(n));
  for (std::size_t e = 0; e < c.count(n); ++e)
    sub.element_form.push_back(metric_form(simplex_lengths(c, m, n, static_cast<int>(e))));

  // Orthogonality of flag legs.
  std::vector<int> perm(n + 1);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t e = 0; e < c.count(n); ++e) {
    const VertexTuple& t = c.faces[n][e];
    const Mat& form = sub.element_form[e];
    std::vector<int> p = perm;
    std::sort(p.begin(), p.end());
    do {
      std::vector<Vec> legs;
      VertexTuple chain;
      Vec prev;
      for (int k = 0; k <= n; ++k) {
        chain.push_back(t[p[k]]);
        VertexTuple key = chain;
        std::sort(key.begin(), key.end());
        const int idx = c.simplex_index(k, key);
        Vec padded = pad_centre(key, sub.centre[k][idx], t);
        if (k > 0) legs.push_back(padded - prev);
        prev = padded;
      }
      for (std::size_t a = 0; a < legs.size(); ++a)
        for (std::size_t b = a + 1; b < legs.size(); ++b) {
          const double na = std::sqrt(std::max(0.0, legs[a].dot(form * legs[a])));
          const double nb = std::sqrt(std::max(0.0, legs[b].dot(form * legs[b])));
          const double ip = std::abs(legs[a].dot(form * legs[b]));
          if (na > 0 && nb > 0) sub.max_leg_skew = std::max(sub.max_leg_skew, ip / (na * nb));
        }
    } while (std::next_permutation(p.begin(), p.end()));
  }
  return sub;
}

DualVolumes dual_volumes(const Complex& c, const Subdivision& sub, const DiscreteMetric& m) {
  const int n = c.dim;
  for (int k = 1; k <= n; ++k)
    for (const Vec& q : sub.centre[k])
      if (q.minCoeff() < 1e-9)
        throw not_well_centred("circumcentre not strictly inside its simplex");

  DualVolumes dv;
  dv.primal.resize(n + 1);
  dv.dual.resize(n + 1);
  dv.nbhd.resize(n + 1);
  dv.nbhd_in_element.resize(n + 1);
  dv.primal[0].assign(c.count(0), 1.0);
  for (int k = 1; k <= n; ++k) {
    dv.primal[k].reserve(c.count(k));
    for (std::size_t i = 0; i < c.count(k); ++i)
      dv.primal[k].push_back(volume(simplex_lengths(c, m, k, static_cast<int>(i))));
  }
  for (int k = 0; k <= n; ++k) {
    dv.dual[k].assign(c.count(k), 0.0);
    dv.nbhd[k].assign(c.count(k), 0.0);
  }
  dv.total_volume = std::accumulate(dv.primal[n].begin(), dv.primal[n].end(), 0.0);

  for (std::size_t e = 0; e < c.count(n); ++e) {
    const VertexTuple& t = c.faces[n][e];
    const Mat& form = sub.element_form[e];
    auto leg_length = [&](const Vec& a, const Vec& b) {
      Vec w = b - a;
      return std::sqrt(std::max(0.0, w.dot(form * w)));
    };

    // Neighbourhood volumes: one full flag per vertex ordering of t.
    std::vector<int> p(n + 1);
    std::iota(p.begin(), p.end(), 0);
    do {
      VertexTuple chain;
      std::vector<int> face_idx(n + 1);
      std::vector<Vec> padded(n + 1);
      for (int k = 0; k <= n; ++k) {
        chain.push_back(t[p[k]]);
        VertexTuple key = chain;
        std::sort(key.begin(), key.end());
        face_idx[k] = c.simplex_index(k, key);
        padded[k] = pad_centre(key, sub.centre[k][face_idx[k]], t);
      }
      double vol = 1.0 / factorial(n);
      for (int k = 0; k < n; ++k) vol *= leg_length(padded[k], padded[k + 1]);
      for (int k = 0; k <= n; ++k) {
        dv.nbhd[k][face_idx[k]] += vol;
        dv.nbhd_in_element[k][{face_idx[k], static_cast<int>(e)}] += vol;
      }
    } while (std::next_permutation(p.begin(), p.end()));

    // Dual cells: chains from each face of t up to t.
    for (int k = 0; k <= n; ++k) {
      for_each_subset(t, k, [&](const VertexTuple& base) {
        const int s_idx = c.simplex_index(k, base);
        VertexTuple rest;
        for (int v : t)
          if (!std::binary_search(base.begin(), base.end(), v)) rest.push_back(v);
        std::sort(rest.begin(), rest.end());
        do {
          VertexTuple cur = base;
          Vec prev = pad_centre(base, sub.centre[k][s_idx], t);
          double vol = 1.0 / factorial(n - k);
          for (std::size_t step = 0; step < rest.size(); ++step) {
            cur.push_back(rest[step]);
            VertexTuple key = cur;
            std::sort(key.begin(), key.end());
            const int dimk = k + 1 + static_cast<int>(step);
            Vec padded = pad_centre(key, sub.centre[dimk][c.simplex_index(dimk, key)], t);
            vol *= leg_length(prev, padded);
            prev = padded;
          }
          dv.dual[k][s_idx] += vol;
        } while (std::next_permutation(rest.begin(), rest.end()));
      });
    }
  }
  return dv;
}

std::size_t count_flags(const Complex& c, int k) {
  const int n = c.dim;
  // f[d][i]: number of flags of the current length ending at faces[d][i].
  std::vector<std::vector<double>> f(n + 1);
  for (int d = 0; d <= n; ++d) f[d].assign(c.count(d), 1.0);
  for (int step = 0; step < k; ++step) {
    std::vector<std::vector<double>> g(n + 1);
    for (int d = 0; d <= n; ++d) g[d].assign(c.count(d), 0.0);
    for (int big = 1; big <= n; ++big)
      for (std::size_t ti = 0; ti < c.count(big); ++ti)
        for (int small = 0; small < big; ++small)
          for (std::size_t si = 0; si < c.count(small); ++si)
            if (tuple_contains(c.faces[big][ti], c.faces[small][si])) g[big][ti] += f[small][si];
    f = std::move(g);
  }
  double total = 0;
  for (int d = 0; d <= n; ++d)
    for (double v : f[d]) total += v;
  return static_cast<std::size_t>(std::llround(total));
}

}  // namespace kc
