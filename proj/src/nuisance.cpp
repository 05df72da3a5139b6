#include "tate/nuisance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tate/rng.hpp"

namespace tate {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSeparationBound = 30.0;

double expit(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

Eigen::VectorXd feature_row(const PropensityFeatures& f, const std::vector<double>& x) {
  Eigen::VectorXd z(1 + f.raw.size() + f.interactions.size());
  z(0) = 1.0;
  int k = 1;
  for (int i : f.raw) {
    if (i < 0 || static_cast<size_t>(i) >= x.size())
      throw std::invalid_argument("propensity feature index " + std::to_string(i) +
                                  " out of range");
    z(k++) = x[i];
  }
  for (auto [i, j] : f.interactions) {
    if (i < 0 || j < 0 || static_cast<size_t>(i) >= x.size() || static_cast<size_t>(j) >= x.size())
      throw std::invalid_argument("propensity interaction index out of range");
    z(k++) = x[i] * x[j];
  }
  return z;
}

}  // namespace

void validate(const std::vector<CausalSample>& units) {
  if (units.empty()) throw std::invalid_argument("empty sample");
  const size_t l = units[0].x.size();
  if (l == 0) throw std::invalid_argument("units need at least one covariate");
  for (size_t i = 0; i < units.size(); ++i) {
    const auto& u = units[i];
    if (u.x.size() != l) throw std::invalid_argument("covariate length differs across units");
    if (u.a != 0 && u.a != 1) throw std::invalid_argument("treatment must be 0 or 1");
    if (u.y.size() != units[0].y.size())
      throw std::invalid_argument("degree sets differ across units");
    for (const auto& [d, curve] : u.y) {
      if (!units[0].y.count(d)) throw std::invalid_argument("degree sets differ across units");
      if (!(curve.grid == units[0].y.at(d).grid))
        throw std::invalid_argument("units do not share a common grid");
      if (curve.values.size() != static_cast<size_t>(curve.grid.n_points))
        throw std::invalid_argument("curve length does not match its grid");
      for (double v : curve.values)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite curve value");
    }
    for (double v : u.x)
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite covariate");
  }
}

FourierBasis fourier_basis(int J, const SummaryGrid& grid) {
  if (J < 1) throw std::invalid_argument("basis size must be >= 1");
  validate(grid);
  FourierBasis basis;
  basis.grid = grid;
  const double span = grid.length();
  for (int j = 0; j < J; ++j) {
    std::vector<double> row(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) {
      const double s = (grid.at(i) - grid.t_min) / span;
      if (j == 0) {
        row[i] = 1.0 / std::sqrt(span);
      } else {
        const int k = (j + 1) / 2;
        const double arg = 2.0 * kPi * k * s;
        row[i] = std::sqrt(2.0 / span) * (j % 2 == 1 ? std::cos(arg) : std::sin(arg));
      }
    }
    basis.rows.push_back(std::move(row));
  }
  return basis;
}

double trapezoid(const SummaryGrid& grid, const std::vector<double>& f) {
  if (f.size() != static_cast<size_t>(grid.n_points))
    throw std::invalid_argument("function length does not match the grid");
  double acc = 0.5 * (f.front() + f.back());
  for (size_t i = 1; i + 1 < f.size(); ++i) acc += f[i];
  return acc * grid.spacing();
}

std::vector<double> OutcomeModel::predict(int arm, const std::vector<double>& x) const {
  if (arm != 0 && arm != 1) throw std::invalid_argument("arm must be 0 or 1");
  Eigen::VectorXd z(x.size() + 1);
  z(0) = 1.0;
  for (size_t i = 0; i < x.size(); ++i) z(i + 1) = x[i];
  const Eigen::VectorXd s = coef[arm] * z;
  std::vector<double> out(grid.n_points, 0.0);
  for (int j = 0; j < J; ++j)
    for (int i = 0; i < grid.n_points; ++i) out[i] += s(j) * basis.rows[j][i];
  return out;
}

std::vector<double> OutcomeModel::smoother_weights(int arm, const std::vector<double>& x) const {
  Eigen::VectorXd z(x.size() + 1);
  z(0) = 1.0;
  for (size_t i = 0; i < x.size(); ++i) z(i + 1) = x[i];
  const Eigen::VectorXd w = design[arm] * (gram_inv[arm] * z);
  return std::vector<double>(w.data(), w.data() + w.size());
}

std::vector<double> OutcomeModel::projected_training_curve(int arm, int i) const {
  if (i < 0 || i >= scores[arm].rows())
    throw std::invalid_argument("training index out of range");
  std::vector<double> out(grid.n_points, 0.0);
  for (int j = 0; j < J; ++j)
    for (int t = 0; t < grid.n_points; ++t) out[t] += scores[arm](i, j) * basis.rows[j][t];
  return out;
}

OutcomeModel fit_outcome(const std::vector<CausalSample>& train, int degree, int J,
                         double lambda) {
  validate(train);
  if (lambda < 0.0) throw std::invalid_argument("ridge penalty must be >= 0");
  if (!train[0].y.count(degree))
    throw std::invalid_argument("degree " + std::to_string(degree) + " missing from samples");
  const int l = static_cast<int>(train[0].x.size());
  const SummaryGrid grid = train[0].y.at(degree).grid;

  OutcomeModel model;
  model.grid = grid;
  model.degree = degree;
  model.J = J;
  model.lambda = lambda;
  model.basis = fourier_basis(J, grid);

  for (int arm = 0; arm < 2; ++arm) {
    std::vector<int> idx;
    for (size_t i = 0; i < train.size(); ++i)
      if (train[i].a == arm) idx.push_back(static_cast<int>(i));
    if (static_cast<int>(idx.size()) <= l + 1)
      throw std::invalid_argument("arm " + std::to_string(arm) +
                                  " has too few units for the outcome regression");

    const int n = static_cast<int>(idx.size());
    Eigen::MatrixXd Z(n, l + 1);
    Eigen::MatrixXd C(n, J);
    std::vector<double> prod(grid.n_points);
    for (int r = 0; r < n; ++r) {
      const auto& u = train[idx[r]];
      Z(r, 0) = 1.0;
      for (int k = 0; k < l; ++k) Z(r, k + 1) = u.x[k];
      const auto& curve = u.y.at(degree).values;
      for (int j = 0; j < J; ++j) {
        for (int t = 0; t < grid.n_points; ++t) prod[t] = curve[t] * model.basis.rows[j][t];
        C(r, j) = trapezoid(grid, prod);
      }
    }

    Eigen::MatrixXd G = Z.transpose() * Z;
    G.diagonal().array() += lambda;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    if (!lu.isInvertible())
      throw std::invalid_argument("outcome design is singular; set lambda > 0");
    model.gram_inv[arm] = lu.inverse();
    model.coef[arm] = (model.gram_inv[arm] * Z.transpose() * C).transpose();
    model.scores[arm] = C;
    model.design[arm] = Z;
  }
  return model;
}

double PropensityModel::predict(const std::vector<double>& x) const {
  const Eigen::VectorXd z = feature_row(features, x);
  double eta = 0.0;
  for (int i = 0; i < z.size(); ++i) eta += beta[i] * z(i);
  return std::clamp(expit(eta), eps, 1.0 - eps);
}

PropensityModel fit_propensity(const std::vector<CausalSample>& train,
                               const PropensityFeatures& features, double eps, int max_iter,
                               double tol) {
  validate(train);
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("clip eps must lie in (0, 0.5)");
  const int n = static_cast<int>(train.size());
  bool any0 = false, any1 = false;
  for (const auto& u : train) (u.a ? any1 : any0) = true;
  if (!any0 || !any1)
    throw std::invalid_argument("propensity fit needs both treatment arms");

  const int d = static_cast<int>(1 + features.raw.size() + features.interactions.size());
  Eigen::MatrixXd Z(n, d);
  Eigen::VectorXd A(n);
  for (int i = 0; i < n; ++i) {
    Z.row(i) = feature_row(features, train[i].x).transpose();
    A(i) = train[i].a;
  }

  PropensityModel model;
  model.features = features;
  model.eps = eps;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  for (int iter = 0; iter < max_iter; ++iter) {
    const Eigen::VectorXd eta = Z * beta;
    Eigen::VectorXd p(n), w(n);
    for (int i = 0; i < n; ++i) {
      p(i) = expit(eta(i));
      w(i) = std::max(p(i) * (1.0 - p(i)), 1e-10);
    }
    const Eigen::VectorXd grad = Z.transpose() * (A - p);
    if (grad.lpNorm<Eigen::Infinity>() <= tol) break;
    Eigen::MatrixXd H = Z.transpose() * w.asDiagonal() * Z;
    H.diagonal().array() += 1e-12;
    beta += H.ldlt().solve(grad);
    if (beta.lpNorm<Eigen::Infinity>() > kSeparationBound) {
      model.separation_warning = true;
      beta = beta.cwiseMax(-kSeparationBound).cwiseMin(kSeparationBound);
      break;
    }
  }
  model.beta.assign(beta.data(), beta.data() + beta.size());
  return model;
}

FoldPlan make_folds(int n, int K, uint64_t seed) {
  if (K < 2) throw std::invalid_argument("need at least 2 folds");
  if (n < 2 * K) throw std::invalid_argument("need n >= 2K for a fold plan");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);

  FoldPlan plan;
  plan.seed = seed;
  const int base = n / K;
  const int rem = n % K;
  int pos = 0;
  for (int k = 0; k < K; ++k) {
    const int size = base + (k < rem ? 1 : 0);
    plan.folds.emplace_back(idx.begin() + pos, idx.begin() + pos + size);
    pos += size;
  }
  return plan;
}

}  // namespace tate
