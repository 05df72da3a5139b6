#include "tate/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tate/rng.hpp"

namespace tate {
namespace {

const SilhouetteCurve& curve_of(const CausalSample& u, int degree) {
  const auto it = u.y.find(degree);
  if (it == u.y.end())
    throw std::invalid_argument("degree " + std::to_string(degree) + " missing from sample");
  return it->second;
}

SummaryGrid common_grid(const std::vector<CausalSample>& samples, int degree) {
  validate(samples);
  return curve_of(samples[0], degree).grid;
}

double ipw_weight(int a, double p) { return a ? 1.0 / p : -1.0 / (1.0 - p); }

bool complement_supports_fit(const std::vector<CausalSample>& samples,
                             const std::vector<char>& in_fold) {
  const int l = static_cast<int>(samples[0].x.size());
  int n0 = 0, n1 = 0;
  for (size_t i = 0; i < samples.size(); ++i) {
    if (in_fold[i]) continue;
    (samples[i].a ? n1 : n0)++;
  }
  return n0 > l + 1 && n1 > l + 1;
}

}  // namespace

EffectEstimate estimate_pi(const std::vector<CausalSample>& samples, const OutcomeModel& model,
                           int degree) {
  const SummaryGrid grid = common_grid(samples, degree);
  if (!(model.grid == grid)) throw std::invalid_argument("model grid does not match samples");
  const int n = static_cast<int>(samples.size());
  const int T = grid.n_points;

  EffectEstimate est;
  est.kind = EstimatorKind::kPI;
  est.degree = degree;
  est.grid = grid;
  est.n = n;
  est.curve.assign(T, 0.0);
  for (const auto& u : samples) {
    const auto m1 = model.predict(1, u.x);
    const auto m0 = model.predict(0, u.x);
    for (int t = 0; t < T; ++t) est.curve[t] += (m1[t] - m0[t]) / n;
  }
  return est;
}

EffectEstimate estimate_ipw(const std::vector<CausalSample>& samples, const PropensityModel& model,
                            int degree) {
  std::vector<double> p(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) p[i] = model.predict(samples[i].x);
  auto est = estimate_ipw_known(samples, p, degree);
  est.kind = EstimatorKind::kIPW;
  return est;
}

EffectEstimate estimate_ipw_known(const std::vector<CausalSample>& samples,
                                  const std::vector<double>& pi_true, int degree) {
  const SummaryGrid grid = common_grid(samples, degree);
  const int n = static_cast<int>(samples.size());
  if (pi_true.size() != samples.size())
    throw std::invalid_argument("propensity vector length does not match samples");
  for (size_t i = 0; i < pi_true.size(); ++i) {
    const double p = pi_true[i];
    if (!(p >= 0.0 && p <= 1.0) || (samples[i].a == 1 && p <= 0.0) ||
        (samples[i].a == 0 && p >= 1.0))
      throw std::invalid_argument("propensity value gives an infinite weight");
  }
  const int T = grid.n_points;

  EffectEstimate est;
  est.kind = EstimatorKind::kIPWKnown;
  est.degree = degree;
  est.grid = grid;
  est.n = n;
  est.curve.assign(T, 0.0);
  est.if_matrix.resize(n, T);
  for (int i = 0; i < n; ++i) {
    const double w = ipw_weight(samples[i].a, pi_true[i]);
    const auto& phi = curve_of(samples[i], degree).values;
    for (int t = 0; t < T; ++t) {
      est.if_matrix(i, t) = w * phi[t];
      est.curve[t] += est.if_matrix(i, t) / n;
    }
  }
  return est;
}

std::vector<double> eif_values(const CausalSample& unit, const PropensityModel& prop,
                               const OutcomeModel& outcome, int degree) {
  const auto& observed = curve_of(unit, degree);
  if (!(outcome.grid == observed.grid))
    throw std::invalid_argument("model grid does not match the sample");
  const auto m1 = outcome.predict(1, unit.x);
  const auto m0 = outcome.predict(0, unit.x);
  const double p = prop.predict(unit.x);
  const double w = ipw_weight(unit.a, p);
  const auto& ma = unit.a ? m1 : m0;

  std::vector<double> out(observed.grid.n_points);
  for (int t = 0; t < observed.grid.n_points; ++t)
    out[t] = m1[t] - m0[t] + w * (observed.values[t] - ma[t]);
  return out;
}

EffectEstimate estimate_aipw(const std::vector<CausalSample>& samples, const FoldPlan& plan,
                             const NuisanceConfig& config, int degree) {
  const SummaryGrid grid = common_grid(samples, degree);
  const int n = static_cast<int>(samples.size());
  const int T = grid.n_points;
  if (plan.folds.size() < 2) throw std::invalid_argument("cross-fitting needs at least 2 folds");

  FoldPlan working = plan;
  {
    std::vector<char> seen(n, 0);
    int covered = 0;
    for (const auto& fold : working.folds)
      for (int i : fold) {
        if (i < 0 || i >= n || seen[i])
          throw std::invalid_argument("fold plan is not a partition of the sample");
        seen[i] = 1;
        ++covered;
      }
    if (covered != n) throw std::invalid_argument("fold plan is not a partition of the sample");
  }

  const int K = static_cast<int>(working.folds.size());
  for (int attempt = 0;; ++attempt) {
    bool ok = true;
    for (const auto& fold : working.folds) {
      std::vector<char> in_fold(n, 0);
      for (int i : fold) in_fold[i] = 1;
      if (!complement_supports_fit(samples, in_fold)) {
        ok = false;
        break;
      }
    }
    if (ok) break;
    if (attempt >= 10)
      throw std::runtime_error("could not draw folds whose complements contain both arms");
    working = make_folds(n, K, derive_seed(plan.seed, 0x666f6c64ULL, attempt + 1));
  }

  EffectEstimate est;
  est.kind = EstimatorKind::kAIPW;
  est.degree = degree;
  est.grid = grid;
  est.n = n;
  est.fold_plan = working;
  est.curve.assign(T, 0.0);
  est.if_matrix.resize(n, T);

  for (const auto& fold : working.folds) {
    std::vector<char> in_fold(n, 0);
    for (int i : fold) in_fold[i] = 1;
    std::vector<CausalSample> train;
    train.reserve(n - fold.size());
    for (int i = 0; i < n; ++i)
      if (!in_fold[i]) train.push_back(samples[i]);
    const auto outcome = fit_outcome(train, degree, config.J, config.lambda);
    const auto prop =
        fit_propensity(train, config.features, config.eps, config.max_iter, config.tol);
    for (int i : fold) {
      const auto values = eif_values(samples[i], prop, outcome, degree);
      for (int t = 0; t < T; ++t) est.if_matrix(i, t) = values[t];
    }
  }
  for (int t = 0; t < T; ++t) est.curve[t] = est.if_matrix.col(t).mean();
  return est;
}

CovarianceEstimate covariance(const EffectEstimate& est) {
  if (est.if_matrix.size() == 0)
    throw std::invalid_argument("estimate carries no influence values");
  const int n = static_cast<int>(est.if_matrix.rows());
  if (n < 2) throw std::invalid_argument("covariance needs at least 2 units");

  const Eigen::RowVectorXd mean = est.if_matrix.colwise().mean();
  const Eigen::MatrixXd centered = est.if_matrix.rowwise() - mean;
  CovarianceEstimate cov;
  cov.grid = est.grid;
  cov.sigma = centered.transpose() * centered / (n - 1);
  cov.se.resize(est.grid.n_points);
  for (int t = 0; t < est.grid.n_points; ++t)
    cov.se[t] = std::sqrt(std::max(cov.sigma(t, t), 0.0) / n);
  return cov;
}

TestReport sup_test(const EffectEstimate& est, double alpha, int B, Multiplier multiplier,
                    uint64_t seed) {
  if (est.if_matrix.size() == 0)
    throw std::invalid_argument("sup test needs an estimate with influence values");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (B < 200) throw std::invalid_argument("need at least 200 bootstrap draws");
  const int n = static_cast<int>(est.if_matrix.rows());
  const int T = est.grid.n_points;
  if (est.if_matrix.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("degenerate influence matrix");

  TestReport report;
  report.alpha = alpha;
  report.b = B;
  report.multiplier = multiplier;

  double sup = 0.0;
  for (double v : est.curve) sup = std::max(sup, std::abs(v));
  report.t_n = std::sqrt(static_cast<double>(n)) * sup;

  Eigen::MatrixXd centered = est.if_matrix;
  for (int t = 0; t < T; ++t) centered.col(t).array() -= est.curve[t];

  Rng rng(seed);
  Eigen::VectorXd xi(n);
  report.boot_sups.reserve(B);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int b = 0; b < B; ++b) {
    for (int i = 0; i < n; ++i)
      xi(i) = multiplier == Multiplier::kGaussian ? rng.normal()
                                                  : (rng.uniform() < 0.5 ? -1.0 : 1.0);
    const Eigen::RowVectorXd g = xi.transpose() * centered * scale;
    report.boot_sups.push_back(g.cwiseAbs().maxCoeff());
  }
  std::sort(report.boot_sups.begin(), report.boot_sups.end());
  const int rank = static_cast<int>(std::ceil((1.0 - alpha) * B));
  report.critical = report.boot_sups[std::clamp(rank, 1, B) - 1];
  report.reject = report.t_n > report.critical;
  return report;
}

std::vector<double> bias_oracle(EstimatorKind kind, const NuisanceDeviation& dev,
                                const TruthSpec& truth,
                                const std::vector<std::vector<double>>& xs) {
  if (xs.empty()) throw std::invalid_argument("empty covariate law");
  const int T = truth.grid.n_points;
  std::vector<double> out(T, 0.0);
  for (const auto& x : xs) {
    const double d1 = dev.prop_dev1(x);
    const double d0 = dev.prop_dev0(x);
    if (d1 >= 1.0 || d0 >= 1.0)
      throw std::invalid_argument("propensity deviation implies a nonpositive weight");
    for (int t = 0; t < T; ++t) {
      double term = 0.0;
      switch (kind) {
        case EstimatorKind::kPI:
          term = dev.delta1(t, x) - dev.delta0(t, x);
          break;
        case EstimatorKind::kIPW:
        case EstimatorKind::kIPWKnown:
          term = -(d1 * truth.mu1(t, x) - d0 * truth.mu0(t, x));
          break;
        case EstimatorKind::kAIPW:
          term = dev.delta1(t, x) * d1 - dev.delta0(t, x) * d0;
          break;
      }
      out[t] += term / xs.size();
    }
  }
  return out;
}

std::vector<double> variance_oracle(EstimatorKind kind, const NuisanceDeviation& dev,
                                    const TruthSpec& truth,
                                    const std::vector<std::vector<double>>& xs, int n) {
  if (xs.empty()) throw std::invalid_argument("empty covariate law");
  if (n < 1) throw std::invalid_argument("n must be positive");
  const int T = truth.grid.n_points;
  const int m = static_cast<int>(xs.size());

  std::vector<double> out(T, 0.0);
  std::vector<double> first(m);
  for (int t = 0; t < T; ++t) {
    double resid = 0.0;
    double weight_sq = 0.0;
    for (int i = 0; i < m; ++i) {
      const auto& x = xs[i];
      const double pi1 = truth.pi(x);
      const double pi0 = 1.0 - pi1;
      if (!(pi1 > 0.0 && pi1 < 1.0))
        throw std::invalid_argument("true propensity outside (0, 1)");
      const double d1 = dev.prop_dev1(x);
      const double d0 = dev.prop_dev0(x);
      if (d1 >= 1.0 || d0 >= 1.0)
        throw std::invalid_argument("propensity deviation implies a nonpositive weight");
      const double mu1 = truth.mu1(t, x);
      const double mu0 = truth.mu0(t, x);
      const double D1 = dev.delta1(t, x);
      const double D0 = dev.delta0(t, x);

      switch (kind) {
        case EstimatorKind::kPI:
          first[i] = mu1 + D1 - mu0 - D0;
          break;
        case EstimatorKind::kIPW:
        case EstimatorKind::kIPWKnown:
          first[i] = (1.0 - d1) * mu1 - (1.0 - d0) * mu0;
          break;
        case EstimatorKind::kAIPW:
          first[i] = mu1 + D1 * d1 - mu0 - D0 * d0;
          break;
      }
      if (kind != EstimatorKind::kPI) {
        resid += ((1.0 - d1) * (1.0 - d1) * truth.sigma2_1(t, x) / pi1 +
                  (1.0 - d0) * (1.0 - d0) * truth.sigma2_0(t, x) / pi0) /
                 m;
        const double core1 = kind == EstimatorKind::kAIPW ? D1 : mu1;
        const double core0 = kind == EstimatorKind::kAIPW ? D0 : mu0;
        const double mix = core1 * (1.0 - d1) * std::sqrt(pi0 / pi1) +
                           core0 * (1.0 - d0) * std::sqrt(pi1 / pi0);
        weight_sq += mix * mix / m;
      }
    }
    double mean = std::accumulate(first.begin(), first.end(), 0.0) / m;
    double var_x = 0.0;
    for (double v : first) var_x += (v - mean) * (v - mean) / m;
    out[t] = (var_x + resid + weight_sq) / n;
  }
  return out;
}

EffectEstimate estimate_injected(EstimatorKind kind, const std::vector<CausalSample>& samples,
                                 const InjectedNuisance& nu, int degree) {
  const SummaryGrid grid = common_grid(samples, degree);
  const int n = static_cast<int>(samples.size());
  const int T = grid.n_points;

  EffectEstimate est;
  est.kind = kind;
  est.degree = degree;
  est.grid = grid;
  est.n = n;
  est.curve.assign(T, 0.0);
  if (kind != EstimatorKind::kPI) est.if_matrix.resize(n, T);

  for (int i = 0; i < n; ++i) {
    const auto& u = samples[i];
    const auto& phi = curve_of(u, degree).values;
    const double p1 = nu.pi1hat(u.x);
    const double p0 = nu.pi0hat(u.x);
    if (kind != EstimatorKind::kPI && (!(p1 > 0.0) || !(p0 > 0.0)))
      throw std::invalid_argument("injected weighting probability must be positive");
    const double w = u.a ? 1.0 / p1 : -1.0 / p0;
    for (int t = 0; t < T; ++t) {
      double value = 0.0;
      switch (kind) {
        case EstimatorKind::kPI:
          value = nu.mu1hat(t, u.x) - nu.mu0hat(t, u.x);
          break;
        case EstimatorKind::kIPW:
        case EstimatorKind::kIPWKnown:
          value = w * phi[t];
          break;
        case EstimatorKind::kAIPW: {
          const double ma = u.a ? nu.mu1hat(t, u.x) : nu.mu0hat(t, u.x);
          value = nu.mu1hat(t, u.x) - nu.mu0hat(t, u.x) + w * (phi[t] - ma);
          break;
        }
      }
      if (kind != EstimatorKind::kPI) est.if_matrix(i, t) = value;
      est.curve[t] += value / n;
    }
  }
  return est;
}

double l1_distance(const SummaryGrid& grid, const std::vector<double>& a,
                   const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() != static_cast<size_t>(grid.n_points))
    throw std::invalid_argument("curves must share the grid");
  std::vector<double> diff(a.size());
  for (size_t i = 0; i < a.size(); ++i) diff[i] = std::abs(a[i] - b[i]);
  return trapezoid(grid, diff);
}

double std_summary(const std::vector<std::vector<double>>& replicate_curves) {
  const int R = static_cast<int>(replicate_curves.size());
  if (R < 2) throw std::invalid_argument("std summary needs at least 2 replicates");
  const size_t T = replicate_curves[0].size();
  for (const auto& c : replicate_curves)
    if (c.size() != T) throw std::invalid_argument("replicate curves differ in length");

  std::vector<double> mean(T, 0.0);
  for (const auto& c : replicate_curves)
    for (size_t t = 0; t < T; ++t) mean[t] += c[t] / R;
  // The mean entry of the across-replicate covariance matrix equals the
  // average over replicates of the squared grid-mean deviation.
  double acc = 0.0;
  for (const auto& c : replicate_curves) {
    double dev = 0.0;
    for (size_t t = 0; t < T; ++t) dev += (c[t] - mean[t]) / T;
    acc += dev * dev / (R - 1);
  }
  return std::sqrt(acc);
}

}  // namespace tate
