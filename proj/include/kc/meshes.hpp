#pragma once

#include "kc/complex.hpp"
#include "kc/manifold.hpp"

#include <array>
#include <cstdint>
#include <random>

namespace kc {

// Triangle mesh with vertex positions (rows) and oriented triangles.
struct TriMesh {
  Mat positions;
  std::vector<std::array<int, 3>> triangles;
};

// Consistently oriented icosahedron on the unit sphere.
TriMesh icosahedron();

// 4-to-1 geodesic-midpoint refinement of the icosahedron, `depth` times.
TriMesh icosphere(int depth);

// Surface mesh with manifold vertex points; elements oriented.
struct ManifoldMesh {
  Complex complex;
  std::vector<Point> points;

  // Edge lengths from the manifold distance.
  DiscreteMetric geodesic_metric() const;
};

// Icosphere as a complex on S^2 (geodesic edge lengths available through
// geodesic_metric) or embedded in R^3 (chordal distances).
ManifoldMesh icosphere_mesh(int depth, ManifoldKind ambient = ManifoldKind::sphere);

// Unit square [0,1]^2, k x k cells split into right triangles; boundary
// vertex indices reported.
struct PlanarMesh {
  Complex complex;
  DiscreteMetric metric;
  Mat positions;  // #V x 2
  std::vector<int> boundary_vertices;
};

PlanarMesh unit_square_mesh(int k);

// Patch of the unit equilateral lattice, `cols` x `rows` rhombus. Horizontal
// edges are parallel to the x-axis.
PlanarMesh equilateral_patch(int cols, int rows);

// Equilateral patch with interior vertices jittered until the mesh is
// well-centred; deterministic in the seed.
PlanarMesh jittered_well_centred_mesh(int cols, int rows, double amplitude, std::uint64_t seed);

// All-equilateral triangulation of the flat torus (k x k vertices, edge
// length 1/k as abstract metric).
struct TorusMesh {
  Complex complex;
  DiscreteMetric metric;
};

TorusMesh equilateral_torus_mesh(int k);

// Equilateral geodesic triangle around the north pole of S^2 with
// circumradius r (vertex distance from the pole).
std::vector<Point> polar_triangle(double r);

}  // namespace kc
