#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tate/geometry.hpp"
#include "tate/summary.hpp"

namespace tate {

// Gaussian-mixture covariates: the first ceil(n/2) units draw from
// N(mu_1, 0.5 I), the rest from N(mu_2, 0.5 I), in five dimensions.
std::vector<std::vector<double>> gen_covariates(int n, uint64_t seed);

// expit(-0.5 x1 - 0.1 x2 + 0.6 x3 + 0.1 x4 + 0.1 x5 + 0.5 x2 x3 - 0.7 x1 x3).
double true_propensity(const std::vector<double>& x);

std::vector<int> assign_treatment(const std::vector<double>& probs, uint64_t seed);

// Linked-twist-map point cloud on the unit square. The initial point is
// uniform and included; by default the y update uses the already-updated x.
PointCloud gen_orbit(double s, int n_points, uint64_t seed, bool simultaneous_update = false);

inline constexpr std::array<double, 3> kOrbitParams = {3.5, 4.0, 4.1};

struct RawOutcomePair {
  Outcome y0;
  Outcome y1;
};

// Counterfactual pairing over three equally sized cloud pools (ascending
// parameter order). Each unit consumes one cloud from each of two distinct
// pools; the higher-parameter cloud becomes y1 with probability p_high.
std::vector<RawOutcomePair> pair_orbit(const std::array<std::vector<PointCloud>, 3>& pools, int n,
                                       double p_high, uint64_t seed);

// Desk-scale image analogue: y0 units are always blob-heavy; a mix fraction
// of y1 units are blob-sparse.
std::vector<RawOutcomePair> synth_image_pairs(int n, double mix, uint64_t seed);

// Desk-scale graph analogue: y0 graphs carry one independent cycle; a mix
// fraction of y1 graphs carry two.
std::vector<RawOutcomePair> synth_graph_pairs(int n, double mix, uint64_t seed);

}  // namespace tate
