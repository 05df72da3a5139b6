#include "tate/geometry.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace tate {

void validate(const PointCloud& cloud) {
  if (cloud.points.empty()) throw std::invalid_argument("point cloud is empty");
  const size_t m = cloud.points[0].size();
  if (m < 2) throw std::invalid_argument("point dimension must be >= 2");
  for (size_t i = 0; i < cloud.points.size(); ++i) {
    if (cloud.points[i].size() != m)
      throw std::invalid_argument("point " + std::to_string(i) + " has mismatched dimension");
    for (double v : cloud.points[i])
      if (!std::isfinite(v))
        throw std::invalid_argument("point " + std::to_string(i) + " has non-finite coordinate");
  }
}

void validate(const ImageGrid& image) {
  if (image.rows < 1 || image.cols < 1) throw std::invalid_argument("image dimensions must be >= 1");
  if (image.values.size() != static_cast<size_t>(image.rows) * image.cols)
    throw std::invalid_argument("image value count does not match rows*cols");
  for (double v : image.values)
    if (!std::isfinite(v)) throw std::invalid_argument("image has non-finite intensity");
}

void validate(const NodeWeightedGraph& graph) {
  const int n = static_cast<int>(graph.node_weights.size());
  if (n < 1) throw std::invalid_argument("graph has no nodes");
  for (double w : graph.node_weights)
    if (!std::isfinite(w)) throw std::invalid_argument("graph has non-finite node weight");
  std::set<std::pair<int, int>> seen;
  for (auto [u, v] : graph.edges) {
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw std::invalid_argument("edge index out of range");
    if (u == v) throw std::invalid_argument("self loops are not allowed");
    auto key = std::minmax(u, v);
    if (!seen.insert({key.first, key.second}).second)
      throw std::invalid_argument("duplicate edge");
  }
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

}  // namespace tate
