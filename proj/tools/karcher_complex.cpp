#include "kc/harness.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"karcher-complex: centre-of-mass simplices, discrete exterior calculus and P1 finite "
               "elements on model manifolds"};

  std::string experiment;
  std::string manifold = "sphere";
  std::string depths = "1..4";
  std::string preset;
  std::string config_path;
  std::string out_path;
  double tol = 1e-12;
  std::uint64_t seed = 1;

  app.add_option("experiment", experiment,
                 "one of: distortion, interpolation, poisson, dec-counterexample, heatflow, "
                 "mean-curvature, delaunay, hodge");
  app.add_option("--manifold", manifold, "euclidean | sphere | hyperbolic | flat_torus");
  app.add_option("--depths", depths, "refinement depths a..b");
  app.add_option("--tol", tol, "solver tolerance");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--preset", preset, "delaunay preset: octahedron | tetrahedron | antipodal | all");
  app.add_option("--out", out_path, "CSV output path (default: stdout)");
  app.add_option("--config", config_path, "key=value config file (flags override)");
  CLI11_PARSE(app, argc, argv);

  try {
    kc::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = kc::parse_config_file(config_path);
    if (!experiment.empty()) cfg.experiment = experiment;
    if (app.count("--manifold") || config_path.empty()) cfg.manifold = kc::manifold_kind_from_string(manifold);
    if (app.count("--depths") || config_path.empty()) {
      const auto dots = depths.find("..");
      if (dots == std::string::npos) throw std::invalid_argument("depths must be 'a..b'");
      cfg.depth_lo = std::stoi(depths.substr(0, dots));
      cfg.depth_hi = std::stoi(depths.substr(dots + 2));
    }
    if (app.count("--tol") || config_path.empty()) cfg.tol = tol;
    if (app.count("--seed") || config_path.empty()) cfg.seed = seed;
    if (app.count("--preset")) cfg.preset = preset;
    if (app.count("--out")) cfg.out_path = out_path;
    if (cfg.depth_hi < cfg.depth_lo) throw std::invalid_argument("depths must increase");
    if (cfg.experiment.empty()) throw std::invalid_argument("no experiment given");

    if (const char* threads = std::getenv("KC_THREADS")) cfg.threads = std::max(1, std::atoi(threads));

    int code = 0;
    if (!cfg.out_path.empty()) {
      std::ofstream out(cfg.out_path);
      if (!out) throw std::invalid_argument("cannot open output path: " + cfg.out_path);
      code = kc::run(cfg, out);
    } else {
      code = kc::run(cfg, std::cout);
    }
    if (code != 0) std::cerr << "experiment threshold failed\n";
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
