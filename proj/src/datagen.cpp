#include "tate/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "tate/rng.hpp"

namespace tate {
namespace {

constexpr std::array<double, 5> kMeanGroup1 = {1.0, 0.6, -0.7, 2.2, -1.0};
constexpr std::array<double, 5> kMeanGroup2 = {0.4, -0.4, -0.6, 3.3, 3.0};
constexpr double kCovScale = 0.5;

constexpr int kImageSide = 24;
constexpr double kImageBase = 0.92;
constexpr double kImageNoiseSd = 0.015;

ImageGrid blob_image(int n_blobs, Rng& rng) {
  ImageGrid img;
  img.rows = kImageSide;
  img.cols = kImageSide;
  img.values.assign(kImageSide * kImageSide, kImageBase);
  for (int b = 0; b < n_blobs; ++b) {
    const double cx = rng.uniform(0.0, kImageSide);
    const double cy = rng.uniform(0.0, kImageSide);
    const double depth = rng.uniform(0.35, 0.75);
    const double sigma = rng.uniform(1.0, 2.2);
    for (int r = 0; r < kImageSide; ++r)
      for (int c = 0; c < kImageSide; ++c) {
        const double d2 = (r - cy) * (r - cy) + (c - cx) * (c - cx);
        img.values[r * kImageSide + c] -= depth * std::exp(-d2 / (2.0 * sigma * sigma));
      }
  }
  for (auto& v : img.values) v = std::clamp(v + kImageNoiseSd * rng.normal(), 0.0, 1.0);
  return img;
}

// Connected random graph with exactly `loops` independent cycles. The first
// extra edge closes a long cycle through the root; the optional second closes
// a short triangle whose node weights are damped, so two-loop graphs carry an
// extra early-born feature.
NodeWeightedGraph loop_graph(int loops, Rng& rng) {
  const int V = 16 + static_cast<int>(rng.below(13));
  NodeWeightedGraph g;
  g.node_weights.resize(V);
  for (auto& w : g.node_weights) w = rng.uniform();

  std::vector<int> parent(V, -1);
  std::set<std::pair<int, int>> present;
  const auto add_edge = [&](int u, int v) {
    if (u > v) std::swap(u, v);
    if (u == v || !present.insert({u, v}).second) return false;
    g.edges.push_back({u, v});
    return true;
  };
  for (int i = 1; i < V; ++i) {
    parent[i] = static_cast<int>(rng.below(i));
    add_edge(parent[i], i);
  }

  if (!add_edge(0, V - 1)) add_edge(1, V - 1);
  if (loops > 1) {
    for (int attempt = 0;; ++attempt) {
      if (attempt < 100) {
        const int k = 2 + static_cast<int>(rng.below(V - 2));
        if (parent[k] == 0) continue;
        const int gp = parent[parent[k]];
        if (!add_edge(k, gp)) continue;
        g.node_weights[k] *= 0.5;
        g.node_weights[parent[k]] *= 0.5;
        g.node_weights[gp] *= 0.5;
      } else {
        const int u = static_cast<int>(rng.below(V));
        const int v = static_cast<int>(rng.below(V));
        if (!add_edge(u, v)) continue;
        g.node_weights[u] *= 0.5;
        g.node_weights[v] *= 0.5;
      }
      break;
    }
  }
  return g;
}

std::vector<char> mix_labels(int n, double mix, Rng& rng) {
  if (!(mix >= 0.0 && mix <= 1.0)) throw std::invalid_argument("mix must lie in [0, 1]");
  const int m = static_cast<int>(std::lround(mix * n));
  std::vector<char> alt(n, 0);
  std::fill(alt.begin(), alt.begin() + m, 1);
  rng.shuffle(alt);
  return alt;
}

}  // namespace

std::vector<std::vector<double>> gen_covariates(int n, uint64_t seed) {
  if (n < 2) throw std::invalid_argument("need at least 2 units");
  Rng rng(seed);
  const int n1 = (n + 1) / 2;
  std::vector<std::vector<double>> xs(n, std::vector<double>(5));
  const double sd = std::sqrt(kCovScale);
  for (int i = 0; i < n; ++i) {
    const auto& mean = i < n1 ? kMeanGroup1 : kMeanGroup2;
    for (int k = 0; k < 5; ++k) xs[i][k] = mean[k] + sd * rng.normal();
  }
  return xs;
}

double true_propensity(const std::vector<double>& x) {
  if (x.size() != 5) throw std::invalid_argument("covariate vector must have length 5");
  const double eta = -0.5 * x[0] - 0.1 * x[1] + 0.6 * x[2] + 0.1 * x[3] + 0.1 * x[4] +
                     0.5 * x[1] * x[2] - 0.7 * x[0] * x[2];
  return 1.0 / (1.0 + std::exp(-eta));
}

std::vector<int> assign_treatment(const std::vector<double>& probs, uint64_t seed) {
  for (double p : probs)
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("treatment probability outside (0, 1)");
  Rng rng(seed);
  std::vector<int> a(probs.size());
  for (size_t i = 0; i < probs.size(); ++i) a[i] = rng.bernoulli(probs[i]) ? 1 : 0;
  return a;
}

PointCloud gen_orbit(double s, int n_points, uint64_t seed, bool simultaneous_update) {
  if (!(s > 0.0)) throw std::invalid_argument("orbit parameter must be positive");
  if (n_points < 1) throw std::invalid_argument("need at least one point");
  Rng rng(seed);
  double x = rng.uniform();
  double y = rng.uniform();
  PointCloud cloud;
  cloud.points.reserve(n_points);
  cloud.points.push_back({x, y});
  for (int i = 1; i < n_points; ++i) {
    const double x_next = std::fmod(x + s * y * (1.0 - y), 1.0);
    const double x_for_y = simultaneous_update ? x : x_next;
    y = std::fmod(y + s * x_for_y * (1.0 - x_for_y), 1.0);
    x = x_next;
    cloud.points.push_back({x, y});
  }
  return cloud;
}

std::vector<RawOutcomePair> pair_orbit(const std::array<std::vector<PointCloud>, 3>& pools, int n,
                                       double p_high, uint64_t seed) {
  if (!(p_high >= 0.0 && p_high <= 1.0))
    throw std::invalid_argument("assignment probability must lie in [0, 1]");
  const size_t pool_size = pools[0].size();
  if (pools[1].size() != pool_size || pools[2].size() != pool_size)
    throw std::invalid_argument("pools must have equal size");

  Rng rng(seed);
  std::array<size_t, 3> cursor = {0, 0, 0};
  const auto take = [&](int p) -> const PointCloud& {
    if (cursor[p] >= pool_size)
      throw std::runtime_error("cloud pool " + std::to_string(p) + " exhausted");
    return pools[p][cursor[p]++];
  };

  constexpr std::array<std::pair<int, int>, 3> kPairs = {{{0, 1}, {0, 2}, {1, 2}}};
  std::vector<RawOutcomePair> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const auto [lo, hi] = kPairs[rng.below(3)];
    const PointCloud& cloud_lo = take(lo);
    const PointCloud& cloud_hi = take(hi);
    RawOutcomePair pair;
    if (rng.uniform() < p_high) {
      pair.y1 = cloud_hi;
      pair.y0 = cloud_lo;
    } else {
      pair.y1 = cloud_lo;
      pair.y0 = cloud_hi;
    }
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<RawOutcomePair> synth_image_pairs(int n, double mix, uint64_t seed) {
  Rng rng(seed);
  const auto sparse = mix_labels(n, mix, rng);
  std::vector<RawOutcomePair> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    RawOutcomePair pair;
    pair.y0 = blob_image(8 + static_cast<int>(rng.below(7)), rng);
    pair.y1 = sparse[i] ? blob_image(1 + static_cast<int>(rng.below(3)), rng)
                        : blob_image(8 + static_cast<int>(rng.below(7)), rng);
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<RawOutcomePair> synth_graph_pairs(int n, double mix, uint64_t seed) {
  Rng rng(seed);
  const auto two_loop = mix_labels(n, mix, rng);
  std::vector<RawOutcomePair> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    RawOutcomePair pair;
    pair.y0 = loop_graph(1, rng);
    pair.y1 = loop_graph(two_loop[i] ? 2 : 1, rng);
    out.push_back(std::move(pair));
  }
  return out;
}

}  // namespace tate
