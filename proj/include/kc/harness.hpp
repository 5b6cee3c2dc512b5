#pragma once

#include "kc/types.hpp"
#include "kc/manifold.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace kc {

struct ExperimentConfig {
  std::string experiment;
  ManifoldKind manifold = ManifoldKind::sphere;
  int depth_lo = 1;
  int depth_hi = 4;
  double tol = 1e-12;
  std::uint64_t seed = 1;
  std::string preset;  // delaunay: octahedron | tetrahedron | antipodal | all
  int threads = 1;
  std::string out_path;
};

ExperimentConfig parse_config_file(const std::string& path);

// Least-squares slope of log(value) against log(h). Throws on fewer than
// three rows or non-positive data.
double fit_slope(const std::vector<std::pair<double, double>>& h_and_value);

struct ExperimentResult {
  std::vector<std::string> comments;          // config echo
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows; // level rows then summary rows
  std::map<std::string, double> metrics;      // named summary values
  bool pass = true;
  std::string detail;
};

ExperimentResult run_distortion(const ExperimentConfig& cfg);
ExperimentResult run_interpolation(const ExperimentConfig& cfg);
ExperimentResult run_poisson(const ExperimentConfig& cfg);
ExperimentResult run_dec_counterexample(const ExperimentConfig& cfg);
ExperimentResult run_heatflow(const ExperimentConfig& cfg);
ExperimentResult run_mean_curvature(const ExperimentConfig& cfg);
ExperimentResult run_delaunay(const ExperimentConfig& cfg);
ExperimentResult run_hodge(const ExperimentConfig& cfg);

// Dispatches on cfg.experiment, writes the CSV, returns the exit code
// (nonzero iff an embedded acceptance threshold fails).
int run(const ExperimentConfig& cfg, std::ostream& csv);

void write_csv(const ExperimentResult& result, std::ostream& out);

std::string format_double(double v);

}  // namespace kc
