#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "tate/nuisance.hpp"

namespace tate {

enum class EstimatorKind { kPI, kIPW, kIPWKnown, kAIPW };

// Settings for the nuisance fits inside cross-fitting.
struct NuisanceConfig {
  int J = 10;
  double lambda = 1e-6;
  PropensityFeatures features;
  double eps = 0.01;
  int max_iter = 100;
  double tol = 1e-8;

  bool operator==(const NuisanceConfig&) const = default;
};

struct EffectEstimate {
  EstimatorKind kind = EstimatorKind::kPI;
  int degree = 0;
  SummaryGrid grid;
  std::vector<double> curve;
  // Per-unit influence values, n x n_points. Empty for the plug-in estimator,
  // which does not come with an influence-function expansion here.
  Eigen::MatrixXd if_matrix;
  int n = 0;
  FoldPlan fold_plan;
};

EffectEstimate estimate_pi(const std::vector<CausalSample>& samples, const OutcomeModel& model,
                           int degree);

EffectEstimate estimate_ipw(const std::vector<CausalSample>& samples, const PropensityModel& model,
                            int degree);

// Known-propensity variant: pi_true[i] is the exact treatment probability of
// unit i.
EffectEstimate estimate_ipw_known(const std::vector<CausalSample>& samples,
                                  const std::vector<double>& pi_true, int degree);

// Uncentered efficient influence function of one unit on the grid:
// mu1 - mu0 + [a/pihat - (1-a)/(1-pihat)] * (phi - mu_a).
std::vector<double> eif_values(const CausalSample& unit, const PropensityModel& prop,
                               const OutcomeModel& outcome, int degree);

// Cross-fitted AIPW: per fold, nuisances are fit on the complement and the
// EIF evaluated on the fold; the estimate is the grand mean over all units.
// Folds whose complement cannot support the fits are redrawn from a derived
// seed a bounded number of times.
EffectEstimate estimate_aipw(const std::vector<CausalSample>& samples, const FoldPlan& plan,
                             const NuisanceConfig& config, int degree);

struct CovarianceEstimate {
  SummaryGrid grid;
  Eigen::MatrixXd sigma;
  std::vector<double> se;  // sqrt(diag / n)
};

CovarianceEstimate covariance(const EffectEstimate& est);

enum class Multiplier { kGaussian, kRademacher };

struct TestReport {
  double t_n = 0.0;
  double critical = 0.0;
  double alpha = 0.05;
  int b = 0;
  Multiplier multiplier = Multiplier::kRademacher;
  bool reject = false;
  std::vector<double> boot_sups;  // sorted bootstrap sup statistics
};

// Sup-norm multiplier-bootstrap test of the zero-curve null. T_n is
// sqrt(n) * max_t |curve|; the critical value is the empirical (1 - alpha)
// quantile of max_t |G_b| over B multiplier draws.
TestReport sup_test(const EffectEstimate& est, double alpha, int B, Multiplier multiplier,
                    uint64_t seed);

// Fixed nuisance-error configuration: additive outcome deviations
// Delta_a(t_index, x) and multiplicative propensity deviations
// delta_a(x) = 1 - pi_a(x)/pihat_a(x).
struct NuisanceDeviation {
  std::function<double(int, const std::vector<double>&)> delta1, delta0;
  std::function<double(const std::vector<double>&)> prop_dev1, prop_dev0;
};

// True data-generating components over the grid, plus per-arm residual
// variance profiles for the variance decomposition.
struct TruthSpec {
  SummaryGrid grid;
  std::function<double(int, const std::vector<double>&)> mu1, mu0;
  std::function<double(const std::vector<double>&)> pi;
  std::function<double(int, const std::vector<double>&)> sigma2_1, sigma2_0;
};

// Closed-form asymptotic bias under the fixed deviations, averaged over the
// empirical covariate law xs.
std::vector<double> bias_oracle(EstimatorKind kind, const NuisanceDeviation& dev,
                                const TruthSpec& truth, const std::vector<std::vector<double>>& xs);

// Pointwise asymptotic variance (already divided by n) of the estimator under
// the same deviations.
std::vector<double> variance_oracle(EstimatorKind kind, const NuisanceDeviation& dev,
                                    const TruthSpec& truth,
                                    const std::vector<std::vector<double>>& xs, int n);

// Estimators evaluated with externally supplied nuisance values; used by the
// Monte Carlo cross-checks of the analytic oracles. pi1hat and pi0hat are the
// per-arm weighting probabilities (pi_a / (1 - delta_a)).
struct InjectedNuisance {
  std::function<double(int, const std::vector<double>&)> mu1hat, mu0hat;
  std::function<double(const std::vector<double>&)> pi1hat, pi0hat;
};

EffectEstimate estimate_injected(EstimatorKind kind, const std::vector<CausalSample>& samples,
                                 const InjectedNuisance& nu, int degree);

double l1_distance(const SummaryGrid& grid, const std::vector<double>& a,
                   const std::vector<double>& b);

// Scalar spread summary over replicate estimate curves: the square root of
// the mean entry of the across-replicate covariance matrix of the curves.
double std_summary(const std::vector<std::vector<double>>& replicate_curves);

}  // namespace tate
