#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "tate/datagen.hpp"
#include "tate/nuisance.hpp"
#include "tate/rng.hpp"

using namespace tate;

namespace {

const SummaryGrid kGrid{0.0, 1.0, 101};

SilhouetteCurve curve_from(const SummaryGrid& grid, const std::vector<double>& values) {
  SilhouetteCurve c;
  c.grid = grid;
  c.r = 1.0;
  c.values = values;
  return c;
}

CausalSample make_unit(const std::vector<double>& x, int a, const std::vector<double>& values,
                       const SummaryGrid& grid = kGrid) {
  CausalSample s;
  s.x = x;
  s.a = a;
  s.y[0] = curve_from(grid, values);
  return s;
}

std::vector<double> eval_on_grid(const SummaryGrid& grid, double (*f)(double)) {
  std::vector<double> v(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) v[i] = f(grid.at(i));
  return v;
}

double logit(double p) { return std::log(p / (1.0 - p)); }

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("fourier basis rows have the stated closed forms") {
  auto basis = fourier_basis(3, kGrid);
  REQUIRE(basis.size() == 3);
  const double len = kGrid.length();
  for (int i = 0; i < kGrid.n_points; ++i) {
    const double s = (kGrid.at(i) - kGrid.t_min) / len;
    CHECK(basis.rows[0][i] == doctest::Approx(1.0 / std::sqrt(len)).epsilon(1e-12));
    CHECK(basis.rows[1][i] ==
          doctest::Approx(std::sqrt(2.0 / len) * std::cos(2 * M_PI * s)).epsilon(1e-9));
    CHECK(basis.rows[2][i] ==
          doctest::Approx(std::sqrt(2.0 / len) * std::sin(2 * M_PI * s)).epsilon(1e-9));
  }
}

TEST_CASE("fourier basis is orthonormal under trapezoid quadrature") {
  for (const SummaryGrid& grid : {SummaryGrid{0.0, 1.0, 201}, SummaryGrid{-0.5, 2.0, 401}}) {
    auto basis = fourier_basis(7, grid);
    for (int a = 0; a < basis.size(); ++a) {
      for (int b = a; b < basis.size(); ++b) {
        std::vector<double> prod(grid.n_points);
        for (int i = 0; i < grid.n_points; ++i) prod[i] = basis.rows[a][i] * basis.rows[b][i];
        const double inner = trapezoid(grid, prod);
        CHECK(inner == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(0).scale(1).epsilon(1e-3));
      }
    }
  }
}

TEST_CASE("fourier basis rejects bad sizes") {
  CHECK_THROWS_AS((void)fourier_basis(0, kGrid), std::invalid_argument);
  CHECK_THROWS_AS((void)fourier_basis(-2, kGrid), std::invalid_argument);
}

TEST_CASE("trapezoid integrates linear functions exactly") {
  std::vector<double> f(kGrid.n_points);
  for (int i = 0; i < kGrid.n_points; ++i) f[i] = 3.0 * kGrid.at(i) + 2.0;
  CHECK(trapezoid(kGrid, f) == doctest::Approx(3.5).epsilon(1e-12));
  std::vector<double> wrong(5, 1.0);
  CHECK_THROWS_AS((void)trapezoid(kGrid, wrong), std::invalid_argument);
}

TEST_CASE("outcome model reproduces constant training curves") {
  std::vector<CausalSample> units;
  for (int i = 0; i < 12; ++i) {
    const double x = i * 0.3 - 1.5;
    units.push_back(make_unit({x}, i % 2, std::vector<double>(kGrid.n_points, i % 2 ? 2.5 : -1.0)));
  }
  auto model = fit_outcome(units, 0, 5);
  for (double x : {-2.0, 0.0, 3.0}) {
    auto p1 = model.predict(1, {x});
    auto p0 = model.predict(0, {x});
    for (int t = 0; t < kGrid.n_points; ++t) {
      CHECK(p1[t] == doctest::Approx(2.5).epsilon(1e-6));
      CHECK(p0[t] == doctest::Approx(-1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("outcome model recovers curves that live in the model class") {
  // Truth: mu(t | x) = 0.8 * x1 * row2(t) + 0.3 * row0(t), identical in both arms.
  auto basis = fourier_basis(4, kGrid);
  std::vector<CausalSample> units;
  Rng rng(17);
  for (int i = 0; i < 30; ++i) {
    const double x = rng.uniform() * 4.0 - 2.0;
    std::vector<double> v(kGrid.n_points);
    for (int t = 0; t < kGrid.n_points; ++t)
      v[t] = 0.8 * x * basis.rows[2][t] + 0.3 * basis.rows[0][t];
    units.push_back(make_unit({x}, i % 2, v));
  }
  auto model = fit_outcome(units, 0, 4, 0.0);
  for (int arm : {0, 1}) {
    CHECK(model.coef[arm](2, 1) == doctest::Approx(0.8).epsilon(1e-8));
    CHECK(model.coef[arm](0, 0) == doctest::Approx(0.3).epsilon(1e-8));
    CHECK(std::abs(model.coef[arm](1, 1)) < 1e-8);
    CHECK(std::abs(model.coef[arm](3, 0)) < 1e-8);
  }
  const double x_new = 1.37;
  std::vector<double> expect(kGrid.n_points);
  for (int t = 0; t < kGrid.n_points; ++t)
    expect[t] = 0.8 * x_new * basis.rows[2][t] + 0.3 * basis.rows[0][t];
  CHECK(max_abs_diff(model.predict(1, {x_new}), expect) < 1e-8);
}

TEST_CASE("prediction equals the smoother-weighted projected training curves") {
  Rng rng(91);
  std::vector<CausalSample> units;
  for (int i = 0; i < 25; ++i) {
    std::vector<double> x = {rng.normal(), rng.normal()};
    std::vector<double> v(kGrid.n_points);
    for (int t = 0; t < kGrid.n_points; ++t) {
      const double u = kGrid.at(t);
      v[t] = std::sin(3 * u + x[0]) * 0.5 + x[1] * u * (1 - u);
    }
    units.push_back(make_unit(x, i % 2, v));
  }
  auto model = fit_outcome(units, 0, 6, 1e-4);
  for (int arm : {0, 1}) {
    const std::vector<double> x_new = {0.4, -1.2};
    auto pred = model.predict(arm, x_new);
    auto w = model.smoother_weights(arm, x_new);
    const int n_arm = static_cast<int>(model.design[arm].rows());
    REQUIRE(static_cast<int>(w.size()) == n_arm);
    std::vector<double> combo(kGrid.n_points, 0.0);
    for (int i = 0; i < n_arm; ++i) {
      auto proj = model.projected_training_curve(arm, i);
      for (int t = 0; t < kGrid.n_points; ++t) combo[t] += w[i] * proj[t];
    }
    CHECK(max_abs_diff(pred, combo) < 1e-9);
  }
}

TEST_CASE("prediction modulus of continuity is bounded by the weighted projections") {
  Rng rng(133);
  std::vector<CausalSample> units;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> x = {rng.uniform() * 2 - 1};
    std::vector<double> v(kGrid.n_points);
    for (int t = 0; t < kGrid.n_points; ++t) v[t] = std::cos(4 * kGrid.at(t)) * (0.5 + x[0]);
    units.push_back(make_unit(x, i % 2, v));
  }
  auto model = fit_outcome(units, 0, 5, 1e-5);
  auto modulus = [](const std::vector<double>& v) {
    double m = 0;
    for (size_t t = 1; t < v.size(); ++t) m = std::max(m, std::abs(v[t] - v[t - 1]));
    return m;
  };
  const std::vector<double> x_new = {0.27};
  auto pred = model.predict(1, x_new);
  auto w = model.smoother_weights(1, x_new);
  double bound = 0, worst = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    worst = std::max(worst, modulus(model.projected_training_curve(1, static_cast<int>(i))));
    bound += std::abs(w[i]);
  }
  CHECK(modulus(pred) <= bound * worst + 1e-12);
}

TEST_CASE("larger basis lowers the in-sample residual") {
  Rng rng(57);
  std::vector<CausalSample> units;
  for (int i = 0; i < 24; ++i) {
    std::vector<double> x = {rng.uniform()};
    std::vector<double> v(kGrid.n_points);
    for (int t = 0; t < kGrid.n_points; ++t) {
      const double u = kGrid.at(t);
      v[t] = std::sin(6 * M_PI * u) * x[0] + std::cos(2 * M_PI * u);
    }
    units.push_back(make_unit(x, i % 2, v));
  }
  auto rss = [&](int J) {
    auto model = fit_outcome(units, 0, J, 0.0);
    double total = 0;
    for (const auto& u : units) {
      auto pred = model.predict(u.a, u.x);
      for (int t = 0; t < kGrid.n_points; ++t)
        total += (pred[t] - u.y.at(0).values[t]) * (pred[t] - u.y.at(0).values[t]);
    }
    return total;
  };
  const double coarse = rss(2), fine = rss(7);
  CHECK(fine < coarse);
  CHECK(fine < 1e-6);
}

TEST_CASE("singular design without ridge is rejected, with ridge it is not") {
  std::vector<CausalSample> units;
  for (int i = 0; i < 10; ++i) {
    const double x = i * 0.5;
    units.push_back(make_unit({x, x}, i % 2, std::vector<double>(kGrid.n_points, x)));
  }
  CHECK_THROWS_WITH_AS((void)fit_outcome(units, 0, 3, 0.0),
                       doctest::Contains("lambda"), std::invalid_argument);
  CHECK_NOTHROW((void)fit_outcome(units, 0, 3, 1e-6));
}

TEST_CASE("ridge penalty shrinks coefficients monotonically") {
  Rng rng(7);
  std::vector<CausalSample> units;
  for (int i = 0; i < 16; ++i) {
    std::vector<double> x = {rng.normal()};
    std::vector<double> v(kGrid.n_points);
    for (int t = 0; t < kGrid.n_points; ++t) v[t] = x[0] * kGrid.at(t) + rng.normal() * 0.01;
    units.push_back(make_unit(x, i % 2, v));
  }
  double prev = -1;
  for (double lambda : {0.0, 0.1, 1.0, 10.0, 100.0}) {
    auto model = fit_outcome(units, 0, 4, lambda);
    const double norm = model.coef[0].norm() + model.coef[1].norm();
    if (prev >= 0) CHECK(norm <= prev + 1e-10);
    prev = norm;
  }
}

TEST_CASE("outcome fit demands enough units per arm") {
  std::vector<CausalSample> units;
  for (int i = 0; i < 8; ++i)
    units.push_back(make_unit({1.0, 2.0, 3.0}, i == 0 ? 1 : 0,
                              std::vector<double>(kGrid.n_points, 1.0)));
  CHECK_THROWS_WITH_AS((void)fit_outcome(units, 0, 3), doctest::Contains("too few"),
                       std::invalid_argument);
}

TEST_CASE("outcome fit rejects a missing degree") {
  std::vector<CausalSample> units;
  for (int i = 0; i < 12; ++i)
    units.push_back(make_unit({0.1 * i}, i % 2, std::vector<double>(kGrid.n_points, 1.0)));
  CHECK_THROWS_AS((void)fit_outcome(units, 3, 4), std::invalid_argument);
}

TEST_CASE("propensity fit recovers independence of treatment and covariates") {
  Rng rng(301);
  std::vector<CausalSample> units;
  int n1 = 0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    const int a = rng.uniform() < 0.3 ? 1 : 0;
    n1 += a;
    units.push_back(make_unit({rng.normal(), rng.normal()}, a, {0.0, 0.0},
                              SummaryGrid{0.0, 1.0, 2}));
  }
  auto model = fit_propensity(units, PropensityFeatures{{0, 1}, {}});
  const double p_hat = static_cast<double>(n1) / n;
  CHECK(model.beta[0] == doctest::Approx(logit(p_hat)).epsilon(0.15));
  CHECK(std::abs(model.beta[1]) < 0.15);
  CHECK(std::abs(model.beta[2]) < 0.15);
  CHECK(model.predict({0.0, 0.0}) == doctest::Approx(p_hat).epsilon(0.05));
  CHECK_FALSE(model.separation_warning);
}

TEST_CASE("propensity fit tracks the synthetic treatment mechanism") {
  const int n = 4000;
  auto xs = gen_covariates(n, 2026);
  std::vector<double> probs(n);
  for (int i = 0; i < n; ++i) probs[i] = true_propensity(xs[i]);
  auto a = assign_treatment(probs, 77);
  std::vector<CausalSample> units;
  for (int i = 0; i < n; ++i)
    units.push_back(make_unit(xs[i], a[i], {0.0, 0.0}, SummaryGrid{0.0, 1.0, 2}));
  PropensityFeatures feats{{0, 1, 2, 3, 4}, {{1, 2}, {0, 2}}};
  auto model = fit_propensity(units, feats);
  double sq = 0;
  for (int i = 0; i < n; ++i) {
    const double d = model.predict(xs[i]) - probs[i];
    sq += d * d;
  }
  CHECK(std::sqrt(sq / n) < 0.05);
  CHECK_FALSE(model.separation_warning);
}

TEST_CASE("separated data trips the warning and keeps predictions clipped") {
  std::vector<CausalSample> units;
  for (int i = 0; i < 40; ++i) {
    const double x = (i % 2 ? 1.0 : -1.0) * (0.1 + 0.001 * i);
    units.push_back(make_unit({x}, i % 2, {0.0, 0.0}, SummaryGrid{0.0, 1.0, 2}));
  }
  auto model = fit_propensity(units, PropensityFeatures{{0}, {}});
  CHECK(model.separation_warning);
  for (double b : model.beta) CHECK(std::abs(b) <= 30.0 + 1e-9);
  CHECK(model.predict({50.0}) <= 1.0 - model.eps + 1e-12);
  CHECK(model.predict({-50.0}) >= model.eps - 1e-12);
}

TEST_CASE("propensity fit needs both arms and valid feature indexes") {
  std::vector<CausalSample> units;
  for (int i = 0; i < 10; ++i)
    units.push_back(make_unit({0.1 * i}, 1, {0.0, 0.0}, SummaryGrid{0.0, 1.0, 2}));
  CHECK_THROWS_AS((void)fit_propensity(units, PropensityFeatures{{0}, {}}),
                  std::invalid_argument);
  units[0].a = 0;
  CHECK_THROWS_AS((void)fit_propensity(units, PropensityFeatures{{2}, {}}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)fit_propensity(units, PropensityFeatures{{0}, {{0, 5}}}),
                  std::invalid_argument);
}

TEST_CASE("fold plans partition the indexes with balanced sizes") {
  auto plan = make_folds(10, 2, 5);
  REQUIRE(plan.folds.size() == 2);
  CHECK(plan.folds[0].size() == 5);
  CHECK(plan.folds[1].size() == 5);

  auto odd = make_folds(11, 2, 5);
  CHECK(odd.folds[0].size() == 6);
  CHECK(odd.folds[1].size() == 5);

  auto plan3 = make_folds(23, 3, 99);
  std::vector<int> seen;
  for (const auto& f : plan3.folds) seen.insert(seen.end(), f.begin(), f.end());
  std::sort(seen.begin(), seen.end());
  std::vector<int> expect(23);
  std::iota(expect.begin(), expect.end(), 0);
  CHECK(seen == expect);

  auto again = make_folds(23, 3, 99);
  CHECK(again.folds == plan3.folds);
  CHECK(make_folds(23, 3, 100).folds != plan3.folds);
}

TEST_CASE("fold plans reject degenerate shapes") {
  CHECK_THROWS_AS((void)make_folds(10, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)make_folds(3, 2, 0), std::invalid_argument);
}

TEST_CASE("unit validation catches structural mistakes") {
  std::vector<CausalSample> units;
  units.push_back(make_unit({1.0}, 0, std::vector<double>(kGrid.n_points, 0.5)));
  units.push_back(make_unit({2.0}, 1, std::vector<double>(kGrid.n_points, 0.5)));
  CHECK_NOTHROW(validate(units));

  auto bad_arm = units;
  bad_arm[1].a = 2;
  CHECK_THROWS_AS(validate(bad_arm), std::invalid_argument);

  auto bad_grid = units;
  bad_grid[1].y[0] = curve_from(SummaryGrid{0.0, 2.0, kGrid.n_points},
                                std::vector<double>(kGrid.n_points, 0.5));
  CHECK_THROWS_AS(validate(bad_grid), std::invalid_argument);

  auto bad_x = units;
  bad_x[1].x = {1.0, 2.0};
  CHECK_THROWS_AS(validate(bad_x), std::invalid_argument);

  auto bad_val = units;
  bad_val[0].y[0].values[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validate(bad_val), std::invalid_argument);
}
