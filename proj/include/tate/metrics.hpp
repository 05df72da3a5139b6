#pragma once

#include "tate/summary.hpp"

namespace tate {

inline constexpr int kDiagonal = -1;

// Optimal matching between two diagrams. Entries are point indexes, or
// kDiagonal when a point is matched to its diagonal projection. Every
// off-diagonal point of each diagram appears exactly once.
struct Matching {
  std::vector<std::pair<int, int>> pairs;
  double cost = 0.0;  // the realized W_q distance
};

struct StabilityCertificate {
  double w1 = 0.0;
  double sup_diff = 0.0;
  double L = 0.0;
  double c = 0.0;
  double bound = 0.0;
  bool satisfied = false;
};

/// q-Wasserstein distance with diagonal augmentation, solved exactly by a
/// shortest-augmenting-path assignment solver. Points matched to the diagonal
/// cost persistence/2 in the L-infinity ground metric.
std::pair<double, Matching> wasserstein(const PersistenceDiagram& D, const PersistenceDiagram& Dp,
                                        double q);

/// Exhaustive-enumeration oracle, limited to |D| + |D'| <= 8 points.
double wasserstein_bruteforce(const PersistenceDiagram& D, const PersistenceDiagram& Dp, double q);

/// Upper bound on |w_p - w_p'| for power weights w = persistence^r, from the
/// mean-value estimate 2 r c^{r-1} ||p - p'||_inf with the endpoint of the
/// persistence interval that keeps the bound valid for the given r.
double weight_gap_bound(const DiagramPoint& p, const DiagramPoint& pp, double r);

/// Certificate for ||phi - phi'||_inf <= (1 + 2 L r c^{r-1}) W_1 with
/// L = max persistence^{1-r} and c = max lifetime across both diagrams.
StabilityCertificate stability_check(const PersistenceDiagram& D, const PersistenceDiagram& Dp,
                                     double r, const SummaryGrid& grid);

}  // namespace tate
