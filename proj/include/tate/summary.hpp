#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "tate/persistence.hpp"

namespace tate {

// Equally spaced inclusive grid over the compact interval [t_min, t_max].
struct SummaryGrid {
  double t_min = 0.0;
  double t_max = 1.0;
  int n_points = 201;

  double spacing() const { return (t_max - t_min) / (n_points - 1); }
  double at(int i) const { return t_min + spacing() * i; }
  double length() const { return t_max - t_min; }
  bool operator==(const SummaryGrid&) const = default;
};

void validate(const SummaryGrid& grid);

struct SilhouetteCurve {
  SummaryGrid grid;
  double r = 1.0;
  std::vector<double> values;
  // True when the diagram was empty and the zero curve was substituted.
  bool empty_diagram = false;
};

struct LandscapeCurve {
  SummaryGrid grid;
  int k = 1;
  std::vector<double> values;
};

/// Tent function of a finite birth-death pair: max{0, min{t - birth, death - t}}.
double tent_eval(double birth, double death, double t);

/// Power-weighted silhouette: values_i = sum_p (b-a)^r tent_p(t_i) / sum_p (b-a)^r.
/// An empty diagram yields the all-zero curve with empty_diagram set.
SilhouetteCurve silhouette(const PersistenceDiagram& diag, double r, const SummaryGrid& grid);

/// Persistence landscape: values_i = k-th largest tent value at t_i, zero when
/// the diagram has fewer than k points.
LandscapeCurve landscape(const PersistenceDiagram& diag, int k, const SummaryGrid& grid);

// Settings for the raw-outcome-to-silhouette composition.
enum class Filtration { kRips, kAlpha2d, kGraphSublevel, kCubicalSublevel };

struct PipelineConfig {
  Filtration filtration = Filtration::kAlpha2d;
  int rips_max_dim = 2;
  double rips_max_radius = 1.0;
  double r = 1.0;
  SummaryGrid grid;
  std::vector<int> degrees = {0, 1};
  // Cap policy per degree; degrees without an entry use kDrop.
  std::vector<std::pair<int, CapSpec>> caps;
  uint64_t seed = 0;
};

using Outcome = std::variant<PointCloud, ImageGrid, NodeWeightedGraph>;

struct PipelineResult {
  std::vector<int> degrees;
  std::vector<SilhouetteCurve> curves;        // parallel to degrees
  std::vector<PersistenceDiagram> diagrams;   // after capping, parallel to degrees
  bool rips_fallback = false;
};

/// Filtration -> persistence -> capping -> silhouette for one outcome. The
/// uniform cap stream is derived from (config.seed, unit_index, degree).
PipelineResult pipeline_silhouette(const Outcome& outcome, const PipelineConfig& config,
                                   uint64_t unit_index = 0);

}  // namespace tate
