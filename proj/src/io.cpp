#include "tate/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace tate {

namespace {

[[noreturn]] void fail(const std::string& path, size_t line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  return in;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_real(const std::string& s, const std::string& path, size_t line) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used != s.size()) fail(path, line, "trailing characters in number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    fail(path, line, "expected a real number, got '" + s + "'");
  }
}

int parse_int(const std::string& s, const std::string& path, size_t line) {
  try {
    size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) fail(path, line, "trailing characters in integer '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    fail(path, line, "expected an integer, got '" + s + "'");
  }
}

std::string strip(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

PointCloud read_point_cloud_csv(const std::string& path) {
  auto in = open_in(path);
  PointCloud cloud;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (strip(line).empty()) continue;
    auto fields = split_csv(line);
    std::vector<double> point;
    point.reserve(fields.size());
    for (const auto& f : fields) point.push_back(parse_real(strip(f), path, lineno));
    if (!cloud.points.empty() && point.size() != cloud.points[0].size())
      fail(path, lineno, "row has " + std::to_string(point.size()) + " columns, expected " +
                             std::to_string(cloud.points[0].size()));
    cloud.points.push_back(std::move(point));
  }
  validate(cloud);
  return cloud;
}

void write_point_cloud_csv(const std::string& path, const PointCloud& cloud) {
  auto out = open_out(path);
  for (const auto& p : cloud.points) {
    for (size_t k = 0; k < p.size(); ++k) out << (k ? "," : "") << format_double(p[k]);
    out << "\n";
  }
}

ImageGrid read_image_csv(const std::string& path) {
  auto in = open_in(path);
  ImageGrid img;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (strip(line).empty()) continue;
    auto fields = split_csv(line);
    if (img.rows == 0) img.cols = static_cast<int>(fields.size());
    if (static_cast<int>(fields.size()) != img.cols)
      fail(path, lineno, "row has " + std::to_string(fields.size()) + " columns, expected " +
                             std::to_string(img.cols));
    for (const auto& f : fields) img.values.push_back(parse_real(strip(f), path, lineno));
    ++img.rows;
  }
  validate(img);
  return img;
}

void write_image_csv(const std::string& path, const ImageGrid& image) {
  auto out = open_out(path);
  for (int r = 0; r < image.rows; ++r) {
    for (int c = 0; c < image.cols; ++c) out << (c ? "," : "") << format_double(image.at(r, c));
    out << "\n";
  }
}

ImageGrid read_pgm(const std::string& path) {
  auto in = open_in(path, true);
  auto next_token = [&](size_t approx_line) {
    std::string tok;
    char c;
    while (in.get(c)) {
      if (c == '#') {
        while (in.get(c) && c != '\n') {
        }
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!tok.empty()) return tok;
        continue;
      }
      tok.push_back(c);
    }
    if (tok.empty()) fail(path, approx_line, "unexpected end of PGM header");
    return tok;
  };

  const std::string magic = next_token(1);
  if (magic != "P2" && magic != "P5") fail(path, 1, "not a P2/P5 PGM file");
  const int cols = parse_int(next_token(1), path, 1);
  const int rows = parse_int(next_token(1), path, 1);
  const int maxval = parse_int(next_token(1), path, 1);
  if (cols < 1 || rows < 1) fail(path, 1, "non-positive PGM dimensions");
  if (maxval < 1 || maxval > 255) fail(path, 1, "PGM maxval must be in [1, 255]");

  ImageGrid img;
  img.rows = rows;
  img.cols = cols;
  img.values.reserve(static_cast<size_t>(rows) * cols);
  if (magic == "P2") {
    for (int k = 0; k < rows * cols; ++k) {
      const int v = parse_int(next_token(2), path, 2);
      if (v < 0 || v > maxval) fail(path, 2, "pixel value out of range");
      img.values.push_back(static_cast<double>(v) / maxval);
    }
  } else {
    for (int k = 0; k < rows * cols; ++k) {
      const int v = in.get();
      if (v == EOF) fail(path, 2, "truncated P5 pixel data");
      if (v > maxval) fail(path, 2, "pixel value out of range");
      img.values.push_back(static_cast<double>(v) / maxval);
    }
  }
  validate(img);
  return img;
}

NodeWeightedGraph read_graph_csv(const std::string& path) {
  auto in = open_in(path);
  NodeWeightedGraph g;
  std::string line;
  size_t lineno = 0;
  bool edges_started = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (strip(line).empty()) continue;
    auto fields = split_csv(line);
    const std::string kind = strip(fields[0]);
    if (kind == "node") {
      if (edges_started) fail(path, lineno, "node row after the edge section began");
      if (fields.size() != 2) fail(path, lineno, "node rows need exactly `node,<weight>`");
      g.node_weights.push_back(parse_real(strip(fields[1]), path, lineno));
    } else if (kind == "edge") {
      edges_started = true;
      if (fields.size() != 3) fail(path, lineno, "edge rows need exactly `edge,<u>,<v>`");
      const int u = parse_int(strip(fields[1]), path, lineno);
      const int v = parse_int(strip(fields[2]), path, lineno);
      if (u < 0 || v < 0 || u >= static_cast<int>(g.size()) || v >= static_cast<int>(g.size()))
        fail(path, lineno, "edge endpoint out of range");
      g.edges.emplace_back(u, v);
    } else {
      fail(path, lineno, "expected a `node` or `edge` row, got '" + kind + "'");
    }
  }
  validate(g);
  return g;
}

void write_graph_csv(const std::string& path, const NodeWeightedGraph& graph) {
  auto out = open_out(path);
  for (double w : graph.node_weights) out << "node," << format_double(w) << "\n";
  for (auto [u, v] : graph.edges) out << "edge," << u << "," << v << "\n";
}

void write_diagram_csv(const std::string& path, const std::vector<PersistenceDiagram>& diagrams) {
  auto out = open_out(path);
  out << "dim,birth,death\n";
  for (size_t d = 0; d < diagrams.size(); ++d) {
    for (const auto& p : diagrams[d].points) {
      out << d << "," << format_double(p.birth) << ",";
      if (p.death == kInfDeath)
        out << "inf";
      else
        out << format_double(p.death);
      out << "\n";
    }
  }
}

std::vector<PersistenceDiagram> read_diagram_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  size_t lineno = 0;
  if (!std::getline(in, line) || strip(line) != "dim,birth,death")
    fail(path, 1, "expected header `dim,birth,death`");
  lineno = 1;
  std::vector<PersistenceDiagram> diagrams;
  while (std::getline(in, line)) {
    ++lineno;
    if (strip(line).empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != 3) fail(path, lineno, "expected three columns");
    const int dim = parse_int(strip(fields[0]), path, lineno);
    if (dim < 0) fail(path, lineno, "negative homology degree");
    DiagramPoint p;
    p.dim = dim;
    p.birth = parse_real(strip(fields[1]), path, lineno);
    const std::string death = strip(fields[2]);
    p.death = death == "inf" ? kInfDeath : parse_real(death, path, lineno);
    if (diagrams.size() <= static_cast<size_t>(dim)) diagrams.resize(dim + 1);
    diagrams[dim].points.push_back(p);
  }
  return diagrams;
}

void write_curve_csv(const std::string& path, const SilhouetteCurve& curve) {
  auto out = open_out(path);
  out << "t,value\n";
  for (int i = 0; i < curve.grid.n_points; ++i)
    out << format_double(curve.grid.at(i)) << "," << format_double(curve.values[i]) << "\n";
}

void write_curve_json(const std::string& path, const SilhouetteCurve& curve, int degree) {
  nlohmann::ordered_json j;
  j["degree"] = degree;
  j["r"] = curve.r;
  j["grid"] = {{"min", curve.grid.t_min}, {"max", curve.grid.t_max},
               {"points", curve.grid.n_points}};
  j["empty_diagram"] = curve.empty_diagram;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace tate
