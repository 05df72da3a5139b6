#include "tate/filtered_complex.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>

namespace tate {
namespace {

bool cell_less(const Cell& a, const Cell& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.dim != b.dim) return a.dim < b.dim;
  return a.verts < b.verts;
}

long double orient2d(double ax, double ay, double bx, double by, double cx, double cy) {
  return (static_cast<long double>(bx) - ax) * (static_cast<long double>(cy) - ay) -
         (static_cast<long double>(by) - ay) * (static_cast<long double>(cx) - ax);
}

// Strictly inside the circumcircle of (a,b,c). Exact cocircular ties count as
// outside, which acts as a deterministic symbolic perturbation.
bool in_circumcircle(double ax, double ay, double bx, double by, double cx, double cy,
                     double px, double py) {
  const long double adx = ax - px, ady = ay - py;
  const long double bdx = bx - px, bdy = by - py;
  const long double cdx = cx - px, cdy = cy - py;
  const long double det = (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) +
                          (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy) +
                          (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
  const long double orient = orient2d(ax, ay, bx, by, cx, cy);
  if (orient > 0) return det > 0;
  if (orient < 0) return det < 0;
  return false;
}

struct Circum {
  double x, y, r;
};

Circum circumcircle(double ax, double ay, double bx, double by, double cx, double cy) {
  const double d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
  if (d == 0.0) throw std::runtime_error("degenerate triangle in Delaunay triangulation");
  const double a2 = ax * ax + ay * ay;
  const double b2 = bx * bx + by * by;
  const double c2 = cx * cx + cy * cy;
  Circum cc;
  cc.x = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
  cc.y = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
  cc.r = std::hypot(ax - cc.x, ay - cc.y);
  return cc;
}

struct Tri {
  int a, b, c;
  bool alive = true;
};

// Naive Bowyer-Watson: rescan all live triangles per insertion. Adequate for
// desk-scale clouds and easy to keep deterministic.
std::vector<std::array<int, 3>> delaunay(const std::vector<std::array<double, 2>>& pts) {
  const int n = static_cast<int>(pts.size());
  double xmin = pts[0][0], xmax = pts[0][0], ymin = pts[0][1], ymax = pts[0][1];
  for (const auto& p : pts) {
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]);
    ymax = std::max(ymax, p[1]);
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1.0});
  const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
  std::vector<std::array<double, 2>> v(pts);
  v.push_back({cx - 30.0 * span, cy - 15.0 * span});
  v.push_back({cx + 30.0 * span, cy - 15.0 * span});
  v.push_back({cx, cy + 30.0 * span});

  std::vector<Tri> tris;
  tris.push_back({n, n + 1, n + 2});

  for (int p = 0; p < n; ++p) {
    // Edges of the cavity, counted so that boundary edges appear once.
    std::map<std::pair<int, int>, int> edge_count;
    for (auto& t : tris) {
      if (!t.alive) continue;
      if (in_circumcircle(v[t.a][0], v[t.a][1], v[t.b][0], v[t.b][1], v[t.c][0], v[t.c][1],
                          v[p][0], v[p][1])) {
        t.alive = false;
        const std::array<std::pair<int, int>, 3> es = {
            std::minmax(t.a, t.b), std::minmax(t.b, t.c), std::minmax(t.a, t.c)};
        for (auto e : es) ++edge_count[e];
      }
    }
    for (const auto& [e, cnt] : edge_count)
      if (cnt == 1) tris.push_back({e.first, e.second, p});
    if (tris.size() > 4096 && tris.size() % 512 == 0) {
      std::vector<Tri> compact;
      compact.reserve(tris.size());
      for (const auto& t : tris)
        if (t.alive) compact.push_back(t);
      tris.swap(compact);
    }
  }

  std::vector<std::array<int, 3>> out;
  for (const auto& t : tris) {
    if (!t.alive) continue;
    if (t.a >= n || t.b >= n || t.c >= n) continue;
    std::array<int, 3> s = {t.a, t.b, t.c};
    std::sort(s.begin(), s.end());
    out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void push_cell(FilteredComplex& fc, std::vector<int> verts, int dim, double value) {
  Cell c;
  c.verts = std::move(verts);
  c.dim = dim;
  c.value = value;
  fc.cells.push_back(std::move(c));
}

}  // namespace

void finalize_complex(FilteredComplex& fc) {
  std::sort(fc.cells.begin(), fc.cells.end(), cell_less);
  std::map<std::vector<int>, int> index;
  for (size_t i = 0; i < fc.cells.size(); ++i) {
    if (!index.emplace(fc.cells[i].verts, static_cast<int>(i)).second)
      throw std::logic_error("duplicate cell in filtered complex");
  }
  for (auto& cell : fc.cells) {
    cell.faces.clear();
    if (cell.dim == 0) continue;
    const auto& vs = cell.verts;
    if (vs.size() == static_cast<size_t>(cell.dim) + 1) {
      // Simplex: faces drop one vertex each.
      for (size_t skip = 0; skip < vs.size(); ++skip) {
        std::vector<int> f;
        for (size_t k = 0; k < vs.size(); ++k)
          if (k != skip) f.push_back(vs[k]);
        auto it = index.find(f);
        if (it == index.end()) throw std::logic_error("missing face of simplex");
        cell.faces.push_back(it->second);
      }
    } else {
      // Square under the V-construction: faces are the 2-subsets that exist
      // as edges (the two diagonals are not cells).
      for (size_t i = 0; i < vs.size(); ++i)
        for (size_t j = i + 1; j < vs.size(); ++j) {
          auto it = index.find({vs[i], vs[j]});
          if (it != index.end()) cell.faces.push_back(it->second);
        }
      if (cell.faces.size() != 4) throw std::logic_error("square cell is missing edges");
    }
    std::sort(cell.faces.begin(), cell.faces.end());
    for (int f : cell.faces)
      if (fc.cells[f].value > cell.value)
        throw std::logic_error("non-monotone filtration values");
  }
}

FilteredComplex build_rips(const PointCloud& cloud, int max_dim, double max_radius) {
  validate(cloud);
  if (max_dim != 1 && max_dim != 2) throw std::invalid_argument("max_dim must be 1 or 2");
  if (!(max_radius > 0)) throw std::invalid_argument("max_radius must be positive");

  const int n = static_cast<int>(cloud.size());
  FilteredComplex fc;
  fc.n_vertices = n;
  for (int i = 0; i < n; ++i) push_cell(fc, {i}, 0, 0.0);

  // Edge values in radius units, d(u,v)/2, kept when <= max_radius.
  std::vector<std::vector<double>> ev(n, std::vector<double>(n, -1.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double val = 0.5 * std::sqrt(sq_dist(cloud.points[i], cloud.points[j]));
      if (val <= max_radius) {
        ev[i][j] = ev[j][i] = val;
        push_cell(fc, {i, j}, 1, val);
      }
    }
  if (max_dim == 2) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (ev[i][j] < 0) continue;
        for (int k = j + 1; k < n; ++k) {
          if (ev[i][k] < 0 || ev[j][k] < 0) continue;
          push_cell(fc, {i, j, k}, 2, std::max({ev[i][j], ev[i][k], ev[j][k]}));
        }
      }
  }
  finalize_complex(fc);
  return fc;
}

FilteredComplex build_alpha_2d(const PointCloud& cloud) {
  validate(cloud);
  if (cloud.dim() != 2) throw std::invalid_argument("alpha complex requires 2-D points");

  // Deduplicate exact coincidences; duplicates are re-attached by 0-edges.
  std::map<std::pair<double, double>, int> first_at;
  std::vector<int> rep(cloud.size());
  std::vector<std::array<double, 2>> uniq;
  std::vector<int> uniq_orig;
  for (size_t i = 0; i < cloud.size(); ++i) {
    const auto key = std::make_pair(cloud.points[i][0], cloud.points[i][1]);
    auto it = first_at.find(key);
    if (it == first_at.end()) {
      first_at.emplace(key, static_cast<int>(i));
      rep[i] = static_cast<int>(i);
      uniq.push_back({key.first, key.second});
      uniq_orig.push_back(static_cast<int>(i));
    } else {
      rep[i] = it->second;
    }
  }

  bool collinear = true;
  for (size_t i = 2; i < uniq.size() && collinear; ++i)
    if (orient2d(uniq[0][0], uniq[0][1], uniq[1][0], uniq[1][1], uniq[i][0], uniq[i][1]) != 0)
      collinear = false;

  if (uniq.size() < 3 || collinear) {
    double maxd = 0.0;
    for (size_t i = 0; i < cloud.size(); ++i)
      for (size_t j = i + 1; j < cloud.size(); ++j)
        maxd = std::max(maxd, std::sqrt(sq_dist(cloud.points[i], cloud.points[j])));
    FilteredComplex fc = build_rips(cloud, 2, std::max(0.5 * maxd, 1.0));
    fc.rips_fallback = true;
    return fc;
  }

  const auto tris_u = delaunay(uniq);
  if (tris_u.empty()) throw std::runtime_error("Delaunay triangulation produced no triangles");

  FilteredComplex fc;
  fc.n_vertices = static_cast<int>(cloud.size());
  for (size_t i = 0; i < cloud.size(); ++i) push_cell(fc, {static_cast<int>(i)}, 0, 0.0);
  for (size_t i = 0; i < cloud.size(); ++i)
    if (rep[i] != static_cast<int>(i)) push_cell(fc, {rep[i], static_cast<int>(i)}, 1, 0.0);

  const auto pt = [&](int u) { return uniq[u]; };
  std::vector<double> tri_value(tris_u.size());
  std::map<std::pair<int, int>, std::vector<int>> edge_tris;
  for (size_t t = 0; t < tris_u.size(); ++t) {
    const auto [a, b, c] = tris_u[t];
    tri_value[t] = circumcircle(pt(a)[0], pt(a)[1], pt(b)[0], pt(b)[1], pt(c)[0], pt(c)[1]).r;
    edge_tris[{a, b}].push_back(static_cast<int>(t));
    edge_tris[{a, c}].push_back(static_cast<int>(t));
    edge_tris[{b, c}].push_back(static_cast<int>(t));
  }

  for (const auto& [e, ts] : edge_tris) {
    const auto [u, w] = e;
    const double mx = 0.5 * (pt(u)[0] + pt(w)[0]);
    const double my = 0.5 * (pt(u)[1] + pt(w)[1]);
    const double dx = pt(u)[0] - pt(w)[0], dy = pt(u)[1] - pt(w)[1];
    const double rho2 = 0.25 * (dx * dx + dy * dy);
    bool gabriel = true;
    double min_tri = tri_value[ts[0]];
    for (int t : ts) {
      min_tri = std::min(min_tri, tri_value[t]);
      int opp = tris_u[t][0] + tris_u[t][1] + tris_u[t][2] - u - w;
      const double ox = pt(opp)[0] - mx, oy = pt(opp)[1] - my;
      if (ox * ox + oy * oy < rho2) gabriel = false;
    }
    const double val = gabriel ? std::min(std::sqrt(rho2), min_tri) : min_tri;
    push_cell(fc, {uniq_orig[u], uniq_orig[w]}, 1, val);
  }
  for (size_t t = 0; t < tris_u.size(); ++t) {
    const auto [a, b, c] = tris_u[t];
    std::vector<int> vs = {uniq_orig[a], uniq_orig[b], uniq_orig[c]};
    std::sort(vs.begin(), vs.end());
    push_cell(fc, vs, 2, tri_value[t]);
  }
  finalize_complex(fc);
  return fc;
}

FilteredComplex build_graph_sublevel(const NodeWeightedGraph& graph) {
  validate(graph);
  FilteredComplex fc;
  fc.n_vertices = static_cast<int>(graph.size());
  for (int i = 0; i < fc.n_vertices; ++i) push_cell(fc, {i}, 0, graph.node_weights[i]);
  for (auto [u, v] : graph.edges) {
    const auto mm = std::minmax(u, v);
    push_cell(fc, {mm.first, mm.second}, 1,
              std::max(graph.node_weights[u], graph.node_weights[v]));
  }
  finalize_complex(fc);
  return fc;
}

FilteredComplex build_cubical_sublevel(const ImageGrid& image) {
  validate(image);
  const int R = image.rows, C = image.cols;
  const auto id = [C](int r, int c) { return r * C + c; };
  FilteredComplex fc;
  fc.n_vertices = R * C;
  for (int r = 0; r < R; ++r)
    for (int c = 0; c < C; ++c) push_cell(fc, {id(r, c)}, 0, image.at(r, c));
  for (int r = 0; r < R; ++r)
    for (int c = 0; c + 1 < C; ++c)
      push_cell(fc, {id(r, c), id(r, c + 1)}, 1, std::max(image.at(r, c), image.at(r, c + 1)));
  for (int r = 0; r + 1 < R; ++r)
    for (int c = 0; c < C; ++c)
      push_cell(fc, {id(r, c), id(r + 1, c)}, 1, std::max(image.at(r, c), image.at(r + 1, c)));
  for (int r = 0; r + 1 < R; ++r)
    for (int c = 0; c + 1 < C; ++c) {
      const double v = std::max({image.at(r, c), image.at(r, c + 1), image.at(r + 1, c),
                                 image.at(r + 1, c + 1)});
      push_cell(fc, {id(r, c), id(r, c + 1), id(r + 1, c), id(r + 1, c + 1)}, 2, v);
    }
  finalize_complex(fc);
  return fc;
}

}  // namespace tate
