// Acceptance suite: one check per shipped guarantee, one pass/fail line each.

#include "kc/dec.hpp"
#include "kc/fem.hpp"
#include "kc/harness.hpp"
#include "kc/karcher.hpp"
#include "kc/meshes.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace kc;

namespace {

struct Criterion {
  std::string name;
  std::function<std::pair<bool, std::string>()> check;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool band(double v, double centre, double halfwidth) {
  return v >= centre - halfwidth && v <= centre + halfwidth;
}

std::string fmt(double v) { return format_double(v); }

// Shared expensive runs.
ExperimentResult& distortion_result() {
  static ExperimentResult r = [] {
    ExperimentConfig cfg;
    cfg.experiment = "distortion";
    cfg.depth_lo = 1;
    cfg.depth_hi = 5;
    return run_distortion(cfg);
  }();
  return r;
}

ExperimentResult& sphere_poisson_result() {
  static ExperimentResult r = [] {
    ExperimentConfig cfg;
    cfg.experiment = "poisson";
    cfg.manifold = ManifoldKind::sphere;
    cfg.depth_lo = 1;
    cfg.depth_hi = 4;
    return run_poisson(cfg);
  }();
  return r;
}

ExperimentResult& mean_curvature_result() {
  static ExperimentResult r = [] {
    ExperimentConfig cfg;
    cfg.experiment = "mean-curvature";
    cfg.depth_lo = 1;
    cfg.depth_hi = 4;
    return run_mean_curvature(cfg);
  }();
  return r;
}

std::pair<bool, std::string> euclidean_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> gauss(0, 1);
  std::uniform_real_distribution<double> unif(0, 1);
  const ManifoldTag e3 = ManifoldTag::euclidean(3);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Point> pts;
    for (int i = 0; i < 4; ++i)
      pts.push_back(make_point(e3, (Vec(3) << gauss(rng), gauss(rng), gauss(rng)).finished()));
    Vec lam(4);
    for (int i = 0; i < 4; ++i) lam[i] = unif(rng);
    lam /= lam.sum();
    Vec affine = Vec::Zero(3);
    for (int i = 0; i < 4; ++i) affine += lam[i] * pts[i].x;
    worst = std::max(worst, (karcher_mean(pts, lam).point.x - affine).norm());
  }
  const double dt = seconds_since(t0);
  return {worst <= 1e-8 && dt < 1.0, "max deviation " + fmt(worst) + ", " + fmt(dt) + " s"};
}

std::pair<bool, std::string> metric_distortion_order() {
  const auto t0 = std::chrono::steady_clock::now();
  const double slope = distortion_result().metrics.at("slope_metric_defect");
  const double dt = seconds_since(t0);
  return {band(slope, 2.0, 0.3) && dt < 120.0, "slope " + fmt(slope) + ", " + fmt(dt) + " s"};
}

std::pair<bool, std::string> connection_defect_order() {
  const auto t0 = std::chrono::steady_clock::now();
  const double slope = distortion_result().metrics.at("slope_connection_defect");
  const double dt = seconds_since(t0);
  return {band(slope, 1.0, 0.3) && dt < 120.0, "slope " + fmt(slope) + ", " + fmt(dt) + " s"};
}

std::pair<bool, std::string> interpolation_orders() {
  ExperimentConfig cfg;
  cfg.experiment = "interpolation";
  cfg.depth_lo = 1;
  cfg.depth_hi = 5;
  ExperimentResult r = run_interpolation(cfg);
  const double sv = r.metrics.at("slope_value_error");
  const double sg = r.metrics.at("slope_gradient_error");
  return {band(sv, 2.0, 0.3) && band(sg, 1.0, 0.3), "value slope " + fmt(sv) + ", gradient slope " + fmt(sg)};
}

std::pair<bool, std::string> exact_dec_algebra() {
  bool ok = true;
  std::string detail;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-1, 1);

  // test complexes: icosahedron surface (n=2), single tetrahedron (n=3)
  std::vector<std::pair<Complex, DiscreteMetric>> cases;
  {
    TriMesh ico = icosahedron();
    std::vector<VertexTuple> elements;
    for (const auto& t : ico.triangles) elements.push_back({t[0], t[1], t[2]});
    Complex c = build_complex(elements);
    DiscreteMetric m = uniform_metric(c, 1.0);
    cases.emplace_back(std::move(c), std::move(m));
  }
  {
    Complex c = build_complex({{0, 1, 2, 3}});
    DiscreteMetric m = uniform_metric(c, 0.8);
    cases.emplace_back(std::move(c), std::move(m));
  }

  double worst_dd = 0, worst_green = 0, worst_iso = 0, worst_vol = 0;
  for (auto& [c, m] : cases) {
    Subdivision sub = subdivide(c, m);
    DualVolumes dv = dual_volumes(c, sub, m);
    DecOperators ops = build_operators(c, dv);
    const int n = ops.n;
    for (int k = 0; k + 1 < n; ++k) {
      worst_dd = std::max(worst_dd, (Mat(ops.coch_d[k + 1]) * Mat(ops.coch_d[k])).cwiseAbs().maxCoeff());
      worst_dd = std::max(worst_dd, (Mat(ops.pc_d[k + 1]) * Mat(ops.pc_d[k])).cwiseAbs().maxCoeff());
    }
    for (int k = 1; k <= n; ++k)
      for (int trial = 0; trial < 20; ++trial) {
        Vec alpha(static_cast<int>(c.count(k - 1))), beta(static_cast<int>(c.count(k)));
        for (int i = 0; i < alpha.size(); ++i) alpha[i] = unif(rng);
        for (int i = 0; i < beta.size(); ++i) beta[i] = unif(rng);
        const double lhs = ops.pc_inner(k, ops.pc_d[k - 1] * alpha, beta);
        const double rhs = ops.pc_inner(k - 1, alpha, ops.pc_codiff[k] * beta);
        worst_green = std::max(worst_green, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
      }
    for (int k = 0; k <= n; ++k) {
      for (int trial = 0; trial < 50; ++trial) {
        Vec a(static_cast<int>(c.count(k))), b(static_cast<int>(c.count(k)));
        for (int i = 0; i < a.size(); ++i) a[i] = unif(rng);
        for (int i = 0; i < b.size(); ++i) b[i] = unif(rng);
        const double coch = ops.coch_inner(k, a, b);
        const double pc = ops.pc_inner(k, cochain_to_pc(ops, k, a), cochain_to_pc(ops, k, b));
        worst_iso = std::max(worst_iso, std::abs(coch - pc) / std::max(1.0, std::abs(coch)));
        if (k < n) {
          Vec via_c = cochain_to_pc(ops, k + 1, Vec(ops.coch_d[k] * a));
          Vec via_p = ops.pc_d[k] * cochain_to_pc(ops, k, a);
          worst_iso = std::max(worst_iso, (via_c - via_p).cwiseAbs().maxCoeff());
        }
      }
      double binom = 1;
      for (int i = 1; i <= k; ++i) binom = binom * (n - k + i) / i;
      for (std::size_t s = 0; s < c.count(k); ++s)
        worst_vol = std::max(worst_vol,
                             std::abs(dv.primal[k][s] * dv.dual[k][s] - binom * dv.nbhd[k][s]) /
                                 std::max(1.0, binom * dv.nbhd[k][s]));
    }
  }
  ok = worst_dd <= 1e-13 && worst_green <= 1e-12 && worst_iso <= 1e-12 && worst_vol <= 1e-10;

  // boundary ranks on a single 3-simplex
  Complex tet = build_complex({{0, 1, 2, 3}});
  auto binom3 = [](int k) { return (k == 0 || k == 3) ? 1 : 3; };
  for (int k = 1; k <= 3; ++k) {
    Eigen::ColPivHouseholderQR<Mat> qr(Mat(boundary_matrix(tet, k)));
    if (qr.rank() != binom3(k)) ok = false;
  }
  detail = "d^2 " + fmt(worst_dd) + ", green " + fmt(worst_green) + ", isometry " + fmt(worst_iso) +
           ", volume id " + fmt(worst_vol);
  return {ok, detail};
}

std::pair<bool, std::string> counterexample_energy() {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  cfg.experiment = "dec-counterexample";
  ExperimentResult r = run_dec_counterexample(cfg);
  const double dt = seconds_since(t0);
  return {r.pass && dt < 1.0,
          "ratio error " + fmt(r.metrics.at("max_ratio_error")) + ", coefficients " +
              fmt(r.metrics.at("max_coefficient_error")) + ", " + fmt(dt) + " s"};
}

std::pair<bool, std::string> cotan_equivalence() {
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    PlanarMesh mesh = jittered_well_centred_mesh(4, 3, 0.08, seed);
    Subdivision sub = subdivide(mesh.complex, mesh.metric);
    DualVolumes dv = dual_volumes(mesh.complex, sub, mesh.metric);
    DecOperators ops = build_operators(mesh.complex, dv);
    Mat k_pc = Mat(SpMat(ops.pc_d[0].transpose()) * Mat(ops.pc_weight[1].asDiagonal()) * Mat(ops.pc_d[0]));
    Mat k_fem = Mat(assemble(mesh.complex, mesh.metric).stiffness);
    worst = std::max(worst, (k_pc - k_fem).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-10, "max entry gap " + fmt(worst) + " over 10 meshes"};
}

std::pair<bool, std::string> poisson_convergence() {
  ExperimentConfig flat;
  flat.experiment = "poisson";
  flat.manifold = ManifoldKind::euclidean;
  flat.depth_lo = 1;
  flat.depth_hi = 4;
  ExperimentResult fr = run_poisson(flat);
  const double sl2 = fr.metrics.at("slope_l2");
  const double sh1 = fr.metrics.at("slope_h1");
  const double sphere_l2 = sphere_poisson_result().metrics.at("slope_l2");
  const bool ok = band(sl2, 2.0, 0.2) && band(sh1, 1.0, 0.2) && band(sphere_l2, 2.0, 0.3);
  return {ok, "flat L2 " + fmt(sl2) + ", flat H1 " + fmt(sh1) + ", sphere L2 " + fmt(sphere_l2)};
}

std::pair<bool, std::string> metric_perturbation_gap() {
  const double slope = sphere_poisson_result().metrics.at("slope_metric_gap");
  return {band(slope, 2.0, 0.5), "gap slope " + fmt(slope)};
}

std::pair<bool, std::string> heat_flow_gap() {
  ExperimentConfig cfg;
  cfg.experiment = "heatflow";
  cfg.depth_lo = 1;
  cfg.depth_hi = 4;
  ExperimentResult r = run_heatflow(cfg);
  const double slope = r.metrics.at("slope_heat_gap");
  return {band(slope, 2.0, 0.5), "gap slope at t=0.1: " + fmt(slope)};
}

std::pair<bool, std::string> mean_curvature_values() {
  const auto& m = mean_curvature_result().metrics;
  const double mn = m.at("sphere_min_norm"), mx = m.at("sphere_max_norm"),
               ang = m.at("sphere_max_angle_deg");
  const double flat_grad = m.at("planar_interior_gradient"), flat_l2 = m.at("planar_interior_l2");
  const bool ok = mn >= 1.8 && mx <= 2.2 && ang <= 5.0 && flat_grad <= 1e-10 && flat_l2 <= 1e-10;
  return {ok, "|H| in [" + fmt(mn) + ", " + fmt(mx) + "], angle " + fmt(ang) + " deg, planar " +
                  fmt(std::max(flat_grad, flat_l2))};
}

std::pair<bool, std::string> area_differential_order() {
  const auto& m = mean_curvature_result().metrics;
  const double slope = m.at("slope_area_gap");
  const double flat = m.at("flat_area_gap");
  return {slope >= 0.7 && flat <= 1e-6, "gap slope " + fmt(slope) + ", flat gap " + fmt(flat)};
}

std::pair<bool, std::string> delaunay_presets() {
  ExperimentConfig cfg;
  cfg.experiment = "delaunay";
  ExperimentResult r = run_delaunay(cfg);
  const auto& m = r.metrics;
  const bool octa = m.at("octahedron_vertices") == 6 && m.at("octahedron_edges") == 12 &&
                    m.at("octahedron_triangles") == 8 && m.at("octahedron_euler") == 2 &&
                    std::abs(m.at("octahedron_min_edge") - std::numbers::pi / 2) <= 1e-9 &&
                    std::abs(m.at("octahedron_max_edge") - std::numbers::pi / 2) <= 1e-9;
  const bool tetra = m.at("tetrahedron_vertices") == 4 && m.at("tetrahedron_edges") == 6 &&
                     m.at("tetrahedron_triangles") == 4;
  const bool anti = m.count("antipodal_non_generic") > 0;
  return {octa && tetra && anti, std::string("octahedron ") + (octa ? "ok" : "bad") + ", tetrahedron " +
                                     (tetra ? "ok" : "bad") + ", antipodal " + (anti ? "rejected" : "accepted")};
}

std::pair<bool, std::string> hodge_dimensions() {
  ExperimentConfig cfg;
  cfg.experiment = "hodge";
  ExperimentResult r = run_hodge(cfg);
  const double td = r.metrics.at("torus_harmonic_dim"), sd = r.metrics.at("sphere_harmonic_dim");
  const double resid = std::max(r.metrics.at("torus_residual"), r.metrics.at("sphere_residual"));
  return {td == 2 && sd == 0 && resid <= 1e-9,
          "torus dim " + fmt(td) + ", sphere dim " + fmt(sd) + ", residual " + fmt(resid)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"Euclidean exactness of the barycentric map", euclidean_exactness},
      {"metric distortion order on the sphere family", metric_distortion_order},
      {"connection defect order on the sphere family", connection_defect_order},
      {"interpolation orders for u = z on a spherical cap", interpolation_orders},
      {"exact algebra of the piecewise-constant calculus", exact_dec_algebra},
      {"equilateral lattice counterexample reproduced exactly", counterexample_energy},
      {"degree-0 stiffness equals the cotangent matrix", cotan_equivalence},
      {"Poisson convergence orders (flat square and sphere)", poisson_convergence},
      {"pullback versus edge-length solution gap order", metric_perturbation_gap},
      {"heat-flow metric gap order at fixed time", heat_flow_gap},
      {"mean curvature magnitude and direction on the icosphere", mean_curvature_values},
      {"area differential: measured versus formula", area_differential_order},
      {"Voronoi dual presets on the sphere", delaunay_presets},
      {"harmonic dimensions and Hodge residuals", hodge_dimensions},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
      auto [pass, d] = criteria[i].check();
      ok = pass;
      detail = d;
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("C%02zu %s  %s (%s) [%.2f s]\n", i + 1, ok ? "PASS" : "FAIL", criteria[i].name.c_str(),
                detail.c_str(), seconds_since(t0));
    if (!ok) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
