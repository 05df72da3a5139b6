#include "tate/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tate {
namespace {

constexpr double kBig = std::numeric_limits<double>::max() / 4;

void check_finite(const PersistenceDiagram& d) {
  for (const auto& p : d.points)
    if (!std::isfinite(p.birth) || !std::isfinite(p.death))
      throw std::invalid_argument("diagram has non-finite coordinates; cap first");
}

double linf(const DiagramPoint& a, const DiagramPoint& b) {
  return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

double diag_cost(const DiagramPoint& a) { return 0.5 * (a.death - a.birth); }

// Exact square assignment via shortest augmenting paths with potentials.
// Returns row -> column and writes the optimal total cost.
std::vector<int> solve_assignment(const std::vector<std::vector<double>>& a, double& total) {
  const int n = static_cast<int>(a.size());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kBig);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kBig;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  total = 0.0;
  for (int j = 1; j <= n; ++j) {
    if (p[j] == 0) continue;
    row_to_col[p[j] - 1] = j - 1;
    total += a[p[j] - 1][j - 1];
  }
  return row_to_col;
}

}  // namespace

std::pair<double, Matching> wasserstein(const PersistenceDiagram& D, const PersistenceDiagram& Dp,
                                        double q) {
  if (!(q >= 1)) throw std::invalid_argument("Wasserstein order q must be >= 1");
  check_finite(D);
  check_finite(Dp);
  const int nd = static_cast<int>(D.size());
  const int np = static_cast<int>(Dp.size());
  Matching m;
  if (nd + np == 0) return {0.0, m};

  // Rows: D points then np diagonal slots; columns: D' points then nd slots.
  const int k = nd + np;
  std::vector<std::vector<double>> cost(k, std::vector<double>(k, 0.0));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (i < nd && j < np)
        cost[i][j] = std::pow(linf(D.points[i], Dp.points[j]), q);
      else if (i < nd)
        cost[i][j] = std::pow(diag_cost(D.points[i]), q);
      else if (j < np)
        cost[i][j] = std::pow(diag_cost(Dp.points[j]), q);
    }

  double total = 0.0;
  const auto row_to_col = solve_assignment(cost, total);
  for (int i = 0; i < k; ++i) {
    const int j = row_to_col[i];
    if (i < nd && j < np)
      m.pairs.emplace_back(i, j);
    else if (i < nd)
      m.pairs.emplace_back(i, kDiagonal);
    else if (j < np)
      m.pairs.emplace_back(kDiagonal, j);
  }
  const double dist = std::pow(std::max(total, 0.0), 1.0 / q);
  m.cost = dist;
  return {dist, m};
}

double wasserstein_bruteforce(const PersistenceDiagram& D, const PersistenceDiagram& Dp,
                              double q) {
  if (!(q >= 1)) throw std::invalid_argument("Wasserstein order q must be >= 1");
  check_finite(D);
  check_finite(Dp);
  const int nd = static_cast<int>(D.size());
  const int np = static_cast<int>(Dp.size());
  if (nd + np > 8) throw std::invalid_argument("brute-force limit is 8 points total");
  if (nd + np == 0) return 0.0;

  std::vector<char> used(np, 0);
  double best = kBig;
  // Assign each D point to an unused D' point or the diagonal; leftover D'
  // points then go to the diagonal.
  const auto rec = [&](auto&& self, int i, double acc) -> void {
    if (acc >= best) return;
    if (i == nd) {
      double total = acc;
      for (int j = 0; j < np; ++j)
        if (!used[j]) total += std::pow(diag_cost(Dp.points[j]), q);
      best = std::min(best, total);
      return;
    }
    self(self, i + 1, acc + std::pow(diag_cost(D.points[i]), q));
    for (int j = 0; j < np; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      self(self, i + 1, acc + std::pow(linf(D.points[i], Dp.points[j]), q));
      used[j] = 0;
    }
  };
  rec(rec, 0, 0.0);
  return std::pow(best, 1.0 / q);
}

double weight_gap_bound(const DiagramPoint& p, const DiagramPoint& pp, double r) {
  if (!(r > 0)) throw std::invalid_argument("power weight r must be positive");
  const double pers_a = p.death - p.birth;
  const double pers_b = pp.death - pp.birth;
  const double c = r >= 1.0 ? std::max(pers_a, pers_b) : std::min(pers_a, pers_b);
  return 2.0 * r * std::pow(c, r - 1.0) * linf(p, pp);
}

StabilityCertificate stability_check(const PersistenceDiagram& D, const PersistenceDiagram& Dp,
                                     double r, const SummaryGrid& grid) {
  if (!(r > 0)) throw std::invalid_argument("power weight r must be positive");
  check_finite(D);
  check_finite(Dp);
  StabilityCertificate cert;
  cert.w1 = wasserstein(D, Dp, 1.0).first;

  const auto phi = silhouette(D, r, grid);
  const auto phip = silhouette(Dp, r, grid);
  for (int i = 0; i < grid.n_points; ++i)
    cert.sup_diff = std::max(cert.sup_diff, std::abs(phi.values[i] - phip.values[i]));

  for (const auto& diag : {&D, &Dp})
    for (const auto& p : diag->points) {
      const double pers = p.death - p.birth;
      cert.c = std::max(cert.c, pers);
      cert.L = std::max(cert.L, std::pow(pers, 1.0 - r));
    }
  const double slope = cert.L > 0 ? 2.0 * cert.L * r * std::pow(cert.c, r - 1.0) : 0.0;
  cert.bound = (1.0 + slope) * cert.w1;
  cert.satisfied = cert.sup_diff <= cert.bound + 1e-9;
  return cert;
}

}  // namespace tate
