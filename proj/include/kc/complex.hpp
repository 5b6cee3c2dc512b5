#pragma once

#include "kc/simplex.hpp"
#include "kc/types.hpp"

#include <map>
#include <utility>
#include <vector>

namespace kc {

using VertexTuple = std::vector<int>;

// Oriented regular simplicial complex. Simplices are keyed by their sorted
// vertex tuple; element orientation is kept as a sign relative to the sorted
// order.
struct Complex {
  int dim = 0;
  int vertex_count = 0;

  // faces[k]: sorted vertex tuples of all k-simplices, lexicographic order.
  std::vector<std::vector<VertexTuple>> faces;
  // Orientation sign of each element relative to its sorted tuple.
  std::vector<int> element_sign;
  // For each facet ((n-1)-simplex): incident (element index, induced sign).
  std::vector<std::vector<std::pair<int, int>>> facet_elements;
  std::vector<char> facet_on_boundary;

  std::size_t count(int k) const { return faces[k].size(); }
  int simplex_index(int k, VertexTuple sorted_tuple) const;
  int edge_index(int a, int b) const;
  // All k-faces of element e, as indices into faces[k].
  std::vector<int> element_faces(int e, int k) const;
  bool has_boundary() const;
  bool is_connected() const;

 private:
  std::vector<std::map<VertexTuple, int>> index_;
  friend Complex build_complex(const std::vector<VertexTuple>& elements);
};

// Validates regularity and populates the face tables. Throws
// irregular_complex on repeated vertices, duplicate elements, facets shared
// by three or more elements, or mixed dimensions.
Complex build_complex(const std::vector<VertexTuple>& elements);

// True iff adjacent elements induce opposite orientations on each shared
// facet (so the realization is an oriented manifold).
bool check_orientation(const Complex& c);

// Signed incidence matrix of the boundary operator, #K^{k-1} x #K^k.
SpMat boundary_matrix(const Complex& c, int k);

// Edge length assignment, indexed like faces[1].
struct DiscreteMetric {
  std::vector<double> edge_length;
};

DiscreteMetric uniform_metric(const Complex& c, double length);
// Lengths from a per-edge callback (global vertex ids).
DiscreteMetric metric_from(const Complex& c, const std::function<double(int, int)>& len);

// Edge lengths of one simplex (faces[k][idx]) under the metric.
EdgeLengths simplex_lengths(const Complex& c, const DiscreteMetric& m, int k, int idx);

struct MetricElementReport {
  bool positive_semidefinite = true;
  double fullness = 0;
  double volume = 0;
};

struct MetricReport {
  bool valid = true;
  double mesh_size = 0;       // max edge length
  double min_fullness = 0;
  std::vector<MetricElementReport> elements;
};

MetricReport validate_metric(const Complex& c, const DiscreteMetric& m);

// Circumcentric barycentric subdivision data.
struct Subdivision {
  // centre[k][i]: circumcentre of faces[k][i] in barycentric coordinates of
  // its own sorted vertex tuple.
  std::vector<std::vector<Vec>> centre;
  // metric_form of each element (tangent metric on its standard simplex).
  std::vector<Mat> element_form;
  // Largest deviation from orthogonality among flag leg pairs (diagnostic).
  double max_leg_skew = 0;
};

// Computes circumcentres of every simplex and verifies that the legs between
// successive centres in each full flag are pairwise orthogonal. Throws
// degenerate_simplex for degenerate elements.
Subdivision subdivide(const Complex& c, const DiscreteMetric& m);

struct DualVolumes {
  // primal[k][i] = |s| (0-simplices have volume 1).
  std::vector<std::vector<double>> primal;
  // dual[k][i] = |*s|, realized volume of the dual cell.
  std::vector<std::vector<double>> dual;
  // nbhd[k][i] = |U(s)|, volume of the subdivision neighbourhood.
  std::vector<std::vector<double>> nbhd;
  // nbhd_in_element[k][(simplex, element)] = |U(s) ∩ element|.
  std::vector<std::map<std::pair<int, int>, double>> nbhd_in_element;

  double total_volume = 0;
};

// Requires a well-centred complex (every circumcentre strictly interior,
// all barycentric coordinates >= 1e-9); throws not_well_centred otherwise.
DualVolumes dual_volumes(const Complex& c, const Subdivision& sub, const DiscreteMetric& m);

// Flag enumeration helper: total k-flag count of the complex.
std::size_t count_flags(const Complex& c, int k);

}  // namespace kc
