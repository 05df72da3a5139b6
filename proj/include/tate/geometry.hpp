#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace tate {

// Finite point set in R^m, m >= 2. Row i is one point.
struct PointCloud {
  std::vector<std::vector<double>> points;

  size_t size() const { return points.size(); }
  size_t dim() const { return points.empty() ? 0 : points[0].size(); }
};

// Row-major grid of real intensities.
struct ImageGrid {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  double at(int r, int c) const { return values[static_cast<size_t>(r) * cols + c]; }
};

// Undirected graph with one scalar weight per node. Edges are unordered index
// pairs with u != v and no duplicates.
struct NodeWeightedGraph {
  std::vector<double> node_weights;
  std::vector<std::pair<int, int>> edges;

  size_t size() const { return node_weights.size(); }
};

// Throw std::invalid_argument when the structural invariants fail.
void validate(const PointCloud& cloud);
void validate(const ImageGrid& image);
void validate(const NodeWeightedGraph& graph);

double sq_dist(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace tate
