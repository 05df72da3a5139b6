#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "tate/summary.hpp"

namespace tate {

// One observational unit: covariates, binary treatment, and the observed
// silhouette per homology degree (all units of a study share grids).
struct CausalSample {
  std::vector<double> x;
  int a = 0;
  std::map<int, SilhouetteCurve> y;
};

void validate(const std::vector<CausalSample>& units);

// Orthonormal Fourier rows on the grid interval: the constant 1/sqrt(|T|),
// then sqrt(2/|T|) cos(2 pi k s) and sqrt(2/|T|) sin(2 pi k s) pairs for
// k = 1, 2, ... with s the [0,1]-rescaled abscissa.
struct FourierBasis {
  SummaryGrid grid;
  std::vector<std::vector<double>> rows;

  int size() const { return static_cast<int>(rows.size()); }
};

FourierBasis fourier_basis(int J, const SummaryGrid& grid);

double trapezoid(const SummaryGrid& grid, const std::vector<double>& f);

// Function-on-scalar regression, fit separately per arm: each training curve
// is projected onto the basis by quadrature, and every score is ridge-
// regressed on [1, x]. Predictions are basis expansions, which makes the
// model a linear smoother in the training curves.
struct OutcomeModel {
  SummaryGrid grid;
  int degree = 0;
  int J = 1;
  double lambda = 0.0;
  FourierBasis basis;
  std::array<Eigen::MatrixXd, 2> coef;      // J x (l+1)
  std::array<Eigen::MatrixXd, 2> scores;    // n_arm x J
  std::array<Eigen::MatrixXd, 2> design;    // n_arm x (l+1)
  std::array<Eigen::MatrixXd, 2> gram_inv;  // (l+1) x (l+1)

  std::vector<double> predict(int arm, const std::vector<double>& x) const;
  // Weights w with predict(arm, x) = sum_i w_i * projected_training_curve(arm, i).
  std::vector<double> smoother_weights(int arm, const std::vector<double>& x) const;
  std::vector<double> projected_training_curve(int arm, int i) const;
};

OutcomeModel fit_outcome(const std::vector<CausalSample>& train, int degree, int J,
                         double lambda = 1e-6);

// Which design columns enter the logistic model: raw covariate indexes plus
// optional pairwise products. An intercept is always included.
struct PropensityFeatures {
  std::vector<int> raw;
  std::vector<std::pair<int, int>> interactions;

  bool operator==(const PropensityFeatures&) const = default;
};

struct PropensityModel {
  PropensityFeatures features;
  std::vector<double> beta;
  double eps = 0.01;
  bool separation_warning = false;

  double predict(const std::vector<double>& x) const;
};

PropensityModel fit_propensity(const std::vector<CausalSample>& train,
                               const PropensityFeatures& features, double eps = 0.01,
                               int max_iter = 100, double tol = 1e-8);

struct FoldPlan {
  std::vector<std::vector<int>> folds;
  uint64_t seed = 0;
};

FoldPlan make_folds(int n, int K, uint64_t seed);

}  // namespace tate
