#include "tate/summary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tate/rng.hpp"

namespace tate {

void validate(const SummaryGrid& grid) {
  if (!(grid.t_min < grid.t_max)) throw std::invalid_argument("grid requires t_min < t_max");
  if (grid.n_points < 2) throw std::invalid_argument("grid requires n_points >= 2");
  if (!std::isfinite(grid.t_min) || !std::isfinite(grid.t_max))
    throw std::invalid_argument("grid bounds must be finite");
}

double tent_eval(double birth, double death, double t) {
  if (!(birth < death) || !std::isfinite(birth) || !std::isfinite(death))
    throw std::invalid_argument("tent requires finite birth < death");
  return std::max(0.0, std::min(t - birth, death - t));
}

SilhouetteCurve silhouette(const PersistenceDiagram& diag, double r, const SummaryGrid& grid) {
  validate(grid);
  if (!(r > 0)) throw std::invalid_argument("power weight r must be positive");
  SilhouetteCurve out;
  out.grid = grid;
  out.r = r;
  out.values.assign(grid.n_points, 0.0);
  if (diag.empty()) {
    out.empty_diagram = true;
    return out;
  }
  double total = 0.0;
  std::vector<double> w(diag.size());
  for (size_t p = 0; p < diag.size(); ++p) {
    const auto& pt = diag.points[p];
    if (pt.death == kInfDeath) throw std::invalid_argument("silhouette requires capped diagrams");
    w[p] = std::pow(pt.death - pt.birth, r);
    total += w[p];
  }
  for (int i = 0; i < grid.n_points; ++i) {
    const double t = grid.at(i);
    double acc = 0.0;
    for (size_t p = 0; p < diag.size(); ++p)
      acc += w[p] * tent_eval(diag.points[p].birth, diag.points[p].death, t);
    out.values[i] = acc / total;
  }
  return out;
}

LandscapeCurve landscape(const PersistenceDiagram& diag, int k, const SummaryGrid& grid) {
  validate(grid);
  if (k < 1) throw std::invalid_argument("landscape order k must be >= 1");
  LandscapeCurve out;
  out.grid = grid;
  out.k = k;
  out.values.assign(grid.n_points, 0.0);
  if (static_cast<size_t>(k) > diag.size()) return out;
  std::vector<double> tents(diag.size());
  for (int i = 0; i < grid.n_points; ++i) {
    const double t = grid.at(i);
    for (size_t p = 0; p < diag.size(); ++p) {
      const auto& pt = diag.points[p];
      if (pt.death == kInfDeath) throw std::invalid_argument("landscape requires capped diagrams");
      tents[p] = tent_eval(pt.birth, pt.death, t);
    }
    std::nth_element(tents.begin(), tents.begin() + (k - 1), tents.end(), std::greater<>());
    out.values[i] = tents[k - 1];
  }
  return out;
}

PipelineResult pipeline_silhouette(const Outcome& outcome, const PipelineConfig& config,
                                   uint64_t unit_index) {
  FilteredComplex fc;
  switch (config.filtration) {
    case Filtration::kRips:
      fc = build_rips(std::get<PointCloud>(outcome), config.rips_max_dim, config.rips_max_radius);
      break;
    case Filtration::kAlpha2d:
      fc = build_alpha_2d(std::get<PointCloud>(outcome));
      break;
    case Filtration::kGraphSublevel:
      fc = build_graph_sublevel(std::get<NodeWeightedGraph>(outcome));
      break;
    case Filtration::kCubicalSublevel:
      fc = build_cubical_sublevel(std::get<ImageGrid>(outcome));
      break;
  }

  int max_deg = 0;
  for (int d : config.degrees) max_deg = std::max(max_deg, d);
  const auto diagrams = compute_persistence(fc, max_deg);

  PipelineResult res;
  res.rips_fallback = fc.rips_fallback;
  for (int d : config.degrees) {
    CapSpec spec;  // degrees without an explicit policy drop immortal classes
    for (const auto& [deg, s] : config.caps)
      if (deg == d) spec = s;
    if (spec.mode == CapMode::kUniform)
      spec.seed = derive_seed(config.seed, 0x6361700000ULL + static_cast<uint64_t>(d), unit_index);
    const PersistenceDiagram capped = cap_infinite_deaths(diagrams[d], spec);
    res.degrees.push_back(d);
    res.curves.push_back(silhouette(capped, config.r, config.grid));
    res.diagrams.push_back(capped);
  }
  return res;
}

}  // namespace tate
