#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "tate/filtered_complex.hpp"

namespace tate {

inline constexpr double kInfDeath = std::numeric_limits<double>::infinity();

struct DiagramPoint {
  double birth = 0.0;
  double death = kInfDeath;
  int dim = 0;
};

// Multiset of birth-death pairs for one homology degree. Zero-persistence
// pairs are dropped at creation, so birth < death always holds.
struct PersistenceDiagram {
  std::vector<DiagramPoint> points;

  bool empty() const { return points.empty(); }
  size_t size() const { return points.size(); }
};

// Boundary-matrix column reduction over Z/2. Returns one diagram per degree
// 0..max_hom_dim. The complex must be finalized (sorted, monotone); a
// non-monotone or unsorted complex is rejected.
std::vector<PersistenceDiagram> compute_persistence(const FilteredComplex& fc, int max_hom_dim);

// Elder-rule union-find fast path for degree 0; cells of dimension > 1 are
// ignored. Agrees exactly with compute_persistence degree 0.
PersistenceDiagram compute_h0_unionfind(const FilteredComplex& fc);

enum class CapMode { kFixed, kUniform, kDrop };

struct CapSpec {
  CapMode mode = CapMode::kDrop;
  double cap = 0.0;           // kFixed
  double lo = 0.0, hi = 0.0;  // kUniform
  uint64_t seed = 0;          // kUniform
};

// Replace or remove infinite deaths. kFixed substitutes `cap`; kUniform draws
// one value per immortal point from [lo, hi) in point order; kDrop removes
// the immortal points. Replacement values must exceed every affected birth.
PersistenceDiagram cap_infinite_deaths(const PersistenceDiagram& diag, const CapSpec& spec);

}  // namespace tate
