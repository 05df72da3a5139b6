#pragma once

#include <vector>

#include "tate/geometry.hpp"

namespace tate {

// One cell of a filtered complex. `verts` is the sorted vertex id set naming
// the cell (a simplex, or the pixel corners of a cube). `faces` holds indices
// of the codimension-1 faces after the complex has been finalized.
struct Cell {
  std::vector<int> verts;
  int dim = 0;
  double value = 0.0;
  std::vector<int> faces;
};

// Cells sorted by (filtration value, dimension, lexicographic vertex set).
// Monotone: every face appears no later than its coface and with a value no
// greater than the coface's value.
struct FilteredComplex {
  int n_vertices = 0;
  std::vector<Cell> cells;
  // Set when build_alpha_2d had to fall back to a Rips construction because
  // the cloud had fewer than 3 non-collinear points.
  bool rips_fallback = false;
};

// Vietoris-Rips up to max_dim in {1,2}. Filtration values are stored in
// radius units: an edge {u,v} enters at d(u,v)/2 and a k-simplex at the max
// over its edges. Cells with value > max_radius are excluded.
FilteredComplex build_rips(const PointCloud& cloud, int max_dim, double max_radius);

// Alpha complex of a planar cloud: Delaunay simplices, vertex value 0, edge
// value half length when the diametral ball is empty (Gabriel) and otherwise
// the smallest adjacent triangle value, triangle value its circumradius.
// Degenerate clouds (< 3 non-collinear points) fall back to Rips, flagged.
FilteredComplex build_alpha_2d(const PointCloud& cloud);

// 1-dimensional sublevel complex: vertex value = node weight, edge value =
// max of its endpoint values.
FilteredComplex build_graph_sublevel(const NodeWeightedGraph& graph);

// Cubical sublevel complex under the V-construction: pixels are vertices,
// every higher cube takes the max over its faces.
FilteredComplex build_cubical_sublevel(const ImageGrid& image);

// Sort cells canonically, resolve face indices, verify monotonicity.
void finalize_complex(FilteredComplex& fc);

}  // namespace tate
