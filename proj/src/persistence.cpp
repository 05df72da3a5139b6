#include "tate/persistence.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tate/rng.hpp"

namespace tate {
namespace {

void check_finalized(const FilteredComplex& fc) {
  const auto& cells = fc.cells;
  for (size_t j = 0; j < cells.size(); ++j) {
    if (j + 1 < cells.size()) {
      const Cell& a = cells[j];
      const Cell& b = cells[j + 1];
      const bool ordered = a.value < b.value ||
                           (a.value == b.value &&
                            (a.dim < b.dim || (a.dim == b.dim && a.verts < b.verts)));
      if (!ordered) throw std::invalid_argument("complex cells are not in filtration order");
    }
    for (int f : cells[j].faces) {
      if (f < 0 || static_cast<size_t>(f) >= j)
        throw std::invalid_argument("face index does not precede its coface");
      if (cells[f].value > cells[j].value)
        throw std::invalid_argument("non-monotone filtration rejected");
      if (cells[f].dim != cells[j].dim - 1)
        throw std::invalid_argument("face dimension mismatch");
    }
  }
}

// Symmetric difference of two ascending index lists.
std::vector<int> symdiff(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

std::vector<PersistenceDiagram> compute_persistence(const FilteredComplex& fc, int max_hom_dim) {
  if (max_hom_dim < 0) throw std::invalid_argument("max_hom_dim must be >= 0");
  check_finalized(fc);
  const int n = static_cast<int>(fc.cells.size());

  std::vector<std::vector<int>> reduced(n);
  std::vector<int> pivot_owner(n, -1);
  std::vector<char> positive(n, 0);
  std::vector<char> killed(n, 0);

  for (int j = 0; j < n; ++j) {
    std::vector<int> col = fc.cells[j].faces;
    while (!col.empty() && pivot_owner[col.back()] >= 0)
      col = symdiff(col, reduced[pivot_owner[col.back()]]);
    if (col.empty()) {
      positive[j] = 1;
    } else {
      const int i = col.back();
      pivot_owner[i] = j;
      killed[i] = 1;
      reduced[j] = std::move(col);
    }
  }

  std::vector<PersistenceDiagram> out(max_hom_dim + 1);
  for (int i = 0; i < n; ++i) {
    if (!positive[i]) continue;
    const int d = fc.cells[i].dim;
    if (d > max_hom_dim) continue;
    if (killed[i]) {
      const int j = pivot_owner[i];
      if (fc.cells[i].value < fc.cells[j].value)
        out[d].points.push_back({fc.cells[i].value, fc.cells[j].value, d});
    } else {
      out[d].points.push_back({fc.cells[i].value, kInfDeath, d});
    }
  }
  return out;
}

PersistenceDiagram compute_h0_unionfind(const FilteredComplex& fc) {
  check_finalized(fc);
  const int n = static_cast<int>(fc.cells.size());

  // parent/birth keyed by cell index of the component's oldest vertex.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  PersistenceDiagram diag;
  std::vector<char> is_vertex(n, 0);
  for (int j = 0; j < n; ++j) {
    const Cell& cell = fc.cells[j];
    if (cell.dim == 0) {
      is_vertex[j] = 1;
    } else if (cell.dim == 1) {
      int ra = find(cell.faces[0]);
      int rb = find(cell.faces[1]);
      if (ra == rb) continue;
      // Elder rule: the component whose creating vertex comes later in the
      // filtration order dies at this edge.
      if (ra > rb) std::swap(ra, rb);
      if (fc.cells[rb].value < cell.value)
        diag.points.push_back({fc.cells[rb].value, cell.value, 0});
      parent[rb] = ra;
    }
  }
  for (int j = 0; j < n; ++j)
    if (is_vertex[j] && find(j) == j) diag.points.push_back({fc.cells[j].value, kInfDeath, 0});

  std::sort(diag.points.begin(), diag.points.end(), [](const DiagramPoint& a, const DiagramPoint& b) {
    if (a.birth != b.birth) return a.birth < b.birth;
    return a.death < b.death;
  });
  return diag;
}

PersistenceDiagram cap_infinite_deaths(const PersistenceDiagram& diag, const CapSpec& spec) {
  PersistenceDiagram out;
  out.points.reserve(diag.points.size());
  double max_capped_birth = -kInfDeath;
  for (const auto& p : diag.points)
    if (p.death == kInfDeath) max_capped_birth = std::max(max_capped_birth, p.birth);

  if (max_capped_birth > -kInfDeath) {
    if (spec.mode == CapMode::kFixed && !(spec.cap > max_capped_birth))
      throw std::invalid_argument("cap value " + std::to_string(spec.cap) +
                                  " does not exceed birth " + std::to_string(max_capped_birth));
    if (spec.mode == CapMode::kUniform && !(spec.lo > max_capped_birth && spec.hi >= spec.lo))
      throw std::invalid_argument("uniform cap range must lie above every affected birth");
  }

  Rng rng(spec.seed);
  for (const auto& p : diag.points) {
    if (p.death != kInfDeath) {
      out.points.push_back(p);
      continue;
    }
    switch (spec.mode) {
      case CapMode::kFixed:
        out.points.push_back({p.birth, spec.cap, p.dim});
        break;
      case CapMode::kUniform:
        out.points.push_back({p.birth, rng.uniform(spec.lo, spec.hi), p.dim});
        break;
      case CapMode::kDrop:
        break;
    }
  }
  return out;
}

}  // namespace tate
