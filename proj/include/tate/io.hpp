#pragma once

#include <string>

#include "tate/geometry.hpp"
#include "tate/persistence.hpp"
#include "tate/summary.hpp"

namespace tate {

// Shortest decimal form that round-trips a double exactly; used everywhere a
// float reaches a file so reruns are byte-comparable.
std::string format_double(double v);

// Point clouds: one point per row, comma-separated real coordinates.
PointCloud read_point_cloud_csv(const std::string& path);
void write_point_cloud_csv(const std::string& path, const PointCloud& cloud);

// Images: either a rectangular CSV of intensities or an 8-bit PGM (P2/P5);
// PGM values are rescaled by maxval into [0, 1].
ImageGrid read_image_csv(const std::string& path);
void write_image_csv(const std::string& path, const ImageGrid& image);
ImageGrid read_pgm(const std::string& path);

// Node-weighted graphs: `node,<weight>` rows (node index = row order), then
// `edge,<u>,<v>` rows.
NodeWeightedGraph read_graph_csv(const std::string& path);
void write_graph_csv(const std::string& path, const NodeWeightedGraph& graph);

// Diagrams: header `dim,birth,death`, one feature per row, death `inf` for
// immortal classes.
void write_diagram_csv(const std::string& path, const std::vector<PersistenceDiagram>& diagrams);
std::vector<PersistenceDiagram> read_diagram_csv(const std::string& path);

// Curves: header `t,value`; the JSON side channel carries the grid, weight
// power, degree, and the empty-diagram flag.
void write_curve_csv(const std::string& path, const SilhouetteCurve& curve);
void write_curve_json(const std::string& path, const SilhouetteCurve& curve, int degree);

}  // namespace tate
