#include "tate/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>

#include "json.hpp"
#include "tate/io.hpp"
#include "tate/rng.hpp"

namespace tate {

namespace {

using nlohmann::ordered_json;

constexpr uint64_t kPoolTag = 0x706f6f6cULL;
constexpr uint64_t kPairTag = 0x70616972ULL;
constexpr uint64_t kCovTag = 0x636f7661ULL;
constexpr uint64_t kTreatTag = 0x74726561ULL;
constexpr uint64_t kFoldTag = 0x666f6c64ULL;
constexpr uint64_t kSilTag = 0x73696c68ULL;
constexpr uint64_t kTestTag = 0x74657374ULL;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

DatasetKind parse_dataset(const std::string& s, const std::string& where) {
  if (s == "orbit") return DatasetKind::kOrbit;
  if (s == "synth-image") return DatasetKind::kSynthImage;
  if (s == "synth-graph") return DatasetKind::kSynthGraph;
  throw ConfigError(where + ": unknown dataset '" + s +
                    "' (expected orbit, synth-image, or synth-graph)");
}

Scenario parse_scenario(const std::string& s, const std::string& where) {
  if (s == "none") return Scenario::kNone;
  if (s == "mis-pi") return Scenario::kMisPi;
  if (s == "mis-mu") return Scenario::kMisMu;
  throw ConfigError(where + ": unknown scenario '" + s + "' (expected none, mis-pi, or mis-mu)");
}

EstimatorKind parse_estimator(const std::string& s, const std::string& where) {
  if (s == "pi") return EstimatorKind::kPI;
  if (s == "ipw") return EstimatorKind::kIPW;
  if (s == "aipw") return EstimatorKind::kAIPW;
  throw ConfigError(where + ": unknown estimator '" + s + "' (expected pi, ipw, or aipw)");
}

void validate_config(const ExperimentConfig& c) {
  if (c.n < 2 * c.folds) throw ConfigError("n: need at least 2 units per fold");
  if (c.replicates < 1) throw ConfigError("replicates: must be at least 1");
  if (c.cloud_points < 3) throw ConfigError("cloud_points: must be at least 3");
  if (!(c.mix >= 0.0 && c.mix <= 1.0)) throw ConfigError("mix: must lie in [0, 1]");
  if (!(c.p_high >= 0.0 && c.p_high <= 1.0)) throw ConfigError("p_high: must lie in [0, 1]");
  if (!(c.r > 0.0)) throw ConfigError("r: weight power must be positive");
  if (!(c.grid.t_max > c.grid.t_min) || c.grid.n_points < 2)
    throw ConfigError("grid: need max > min and at least 2 points");
  if (c.degrees.empty()) throw ConfigError("degrees: need at least one homology degree");
  for (int d : c.degrees)
    if (d < 0 || d > 2) throw ConfigError("degrees: supported degrees are 0, 1, 2");
  if (std::set<int>(c.degrees.begin(), c.degrees.end()).size() != c.degrees.size())
    throw ConfigError("degrees: duplicates are not allowed");
  if (c.nuisance.J < 1) throw ConfigError("nuisance.J: must be at least 1");
  if (c.nuisance.lambda < 0.0) throw ConfigError("nuisance.lambda: must be nonnegative");
  if (!(c.nuisance.eps > 0.0 && c.nuisance.eps < 0.5))
    throw ConfigError("nuisance.eps: must lie in (0, 0.5)");
  if (c.mis_mu_j < 1) throw ConfigError("mis_mu_j: must be at least 1");
  if (c.folds < 2) throw ConfigError("folds: cross-fitting needs at least 2 folds");
  if (c.estimators.empty()) throw ConfigError("estimators: need at least one estimator");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha: must lie in (0, 1)");
  if (c.bootstrap < 200) throw ConfigError("bootstrap: need at least 200 draws");
}

NuisanceConfig scenario_nuisance(const ExperimentConfig& c) {
  NuisanceConfig nc = c.nuisance;
  if (c.scenario == Scenario::kMisPi) nc.features = PropensityFeatures{{0, 2}, {}};
  if (c.scenario == Scenario::kMisMu) nc.J = c.mis_mu_j;
  return nc;
}

PipelineConfig pipeline_config(const ExperimentConfig& c) {
  PipelineConfig pipe;
  switch (c.dataset) {
    case DatasetKind::kOrbit:
      pipe.filtration = Filtration::kAlpha2d;
      break;
    case DatasetKind::kSynthImage:
      pipe.filtration = Filtration::kCubicalSublevel;
      break;
    case DatasetKind::kSynthGraph: {
      pipe.filtration = Filtration::kGraphSublevel;
      CapSpec cap;
      cap.mode = CapMode::kUniform;
      cap.lo = 6.5;
      cap.hi = 8.5;
      pipe.caps.emplace_back(1, cap);
      break;
    }
  }
  pipe.r = c.r;
  pipe.grid = c.grid;
  pipe.degrees = c.degrees;
  pipe.seed = derive_seed(c.seed, kSilTag, 0);
  return pipe;
}

std::vector<RawOutcomePair> raw_pairs(const ExperimentConfig& c) {
  switch (c.dataset) {
    case DatasetKind::kOrbit: {
      std::array<std::vector<PointCloud>, 3> pools;
      for (int k = 0; k < 3; ++k) {
        pools[k].reserve(c.n);
        for (int i = 0; i < c.n; ++i)
          pools[k].push_back(gen_orbit(kOrbitParams[k], c.cloud_points,
                                       derive_seed(c.seed, kPoolTag,
                                                   static_cast<uint64_t>(k) * c.n + i)));
      }
      return pair_orbit(pools, c.n, c.p_high, derive_seed(c.seed, kPairTag, 0));
    }
    case DatasetKind::kSynthImage:
      return synth_image_pairs(c.n, c.mix, derive_seed(c.seed, kPoolTag, 0));
    case DatasetKind::kSynthGraph:
      return synth_graph_pairs(c.n, c.mix, derive_seed(c.seed, kPoolTag, 0));
  }
  throw std::logic_error("unreachable dataset kind");
}

StudyPool silhouettes_of(const ExperimentConfig& c, const std::vector<RawOutcomePair>& pairs) {
  const PipelineConfig pipe = pipeline_config(c);
  StudyPool pool;
  pool.y0.resize(pairs.size());
  pool.y1.resize(pairs.size());
  for (size_t i = 0; i < pairs.size(); ++i) {
    auto res0 = pipeline_silhouette(pairs[i].y0, pipe, 2 * static_cast<int>(i));
    auto res1 = pipeline_silhouette(pairs[i].y1, pipe, 2 * static_cast<int>(i) + 1);
    pool.rips_fallbacks += res0.rips_fallback + res1.rips_fallback;
    for (size_t k = 0; k < pipe.degrees.size(); ++k) {
      pool.y0[i][pipe.degrees[k]] = res0.curves[k];
      pool.y1[i][pipe.degrees[k]] = res1.curves[k];
    }
  }
  for (int d : c.degrees) {
    std::vector<double> truth(c.grid.n_points, 0.0);
    for (size_t i = 0; i < pairs.size(); ++i)
      for (int t = 0; t < c.grid.n_points; ++t)
        truth[t] += (pool.y1[i].at(d).values[t] - pool.y0[i].at(d).values[t]) / pairs.size();
    pool.truth[d] = std::move(truth);
  }
  return pool;
}

bool plan_supports_fits(const std::vector<CausalSample>& units, const FoldPlan& plan) {
  const int l = static_cast<int>(units[0].x.size());
  for (const auto& fold : plan.folds) {
    std::vector<char> in_fold(units.size(), 0);
    for (int idx : fold) in_fold[idx] = 1;
    int n0 = 0, n1 = 0;
    for (size_t i = 0; i < units.size(); ++i) {
      if (in_fold[i]) continue;
      (units[i].a ? n1 : n0)++;
    }
    if (n0 <= l + 1 || n1 <= l + 1) return false;
  }
  return true;
}

// Same retry policy as the cross-fitted estimator, so every estimator of a
// replicate ends up on the same usable fold plan.
FoldPlan usable_plan(const std::vector<CausalSample>& units, const FoldPlan& plan, int K) {
  FoldPlan working = plan;
  for (int attempt = 0;; ++attempt) {
    if (plan_supports_fits(units, working)) return working;
    if (attempt >= 10)
      throw std::runtime_error("no usable fold plan after 10 redraws: one arm is too small");
    working = make_folds(static_cast<int>(units.size()), K,
                         derive_seed(plan.seed, kFoldTag, attempt + 1));
  }
}

struct ReplicateCurves {
  // keyed by (estimator, degree) in config order
  std::map<std::pair<int, int>, std::vector<double>> curves;
};

ReplicateCurves run_replicate(const ExperimentConfig& c, const StudyPool& pool, int rep) {
  auto units = draw_replicate(c, pool, rep);
  const NuisanceConfig nc = scenario_nuisance(c);
  FoldPlan plan = usable_plan(units, make_folds(c.n, c.folds, derive_seed(c.seed, kFoldTag, rep)),
                              c.folds);

  const bool want_pi = std::count(c.estimators.begin(), c.estimators.end(), EstimatorKind::kPI);
  const bool want_ipw = std::count(c.estimators.begin(), c.estimators.end(), EstimatorKind::kIPW);
  const bool want_aipw =
      std::count(c.estimators.begin(), c.estimators.end(), EstimatorKind::kAIPW);

  ReplicateCurves out;
  if (want_pi || want_ipw) {
    for (int d : c.degrees) {
      std::vector<double> pi_curve(c.grid.n_points, 0.0), ipw_curve(c.grid.n_points, 0.0);
      for (const auto& fold : plan.folds) {
        std::vector<char> in_fold(units.size(), 0);
        for (int idx : fold) in_fold[idx] = 1;
        std::vector<CausalSample> train, eval;
        for (size_t i = 0; i < units.size(); ++i)
          (in_fold[i] ? eval : train).push_back(units[i]);
        const double w = static_cast<double>(eval.size()) / units.size();
        if (want_pi) {
          auto model = fit_outcome(train, d, nc.J, nc.lambda);
          auto part = estimate_pi(eval, model, d);
          for (int t = 0; t < c.grid.n_points; ++t) pi_curve[t] += w * part.curve[t];
        }
        if (want_ipw) {
          auto prop = fit_propensity(train, nc.features, nc.eps, nc.max_iter, nc.tol);
          auto part = estimate_ipw(eval, prop, d);
          for (int t = 0; t < c.grid.n_points; ++t) ipw_curve[t] += w * part.curve[t];
        }
      }
      if (want_pi) out.curves[{static_cast<int>(EstimatorKind::kPI), d}] = std::move(pi_curve);
      if (want_ipw) out.curves[{static_cast<int>(EstimatorKind::kIPW), d}] = std::move(ipw_curve);
    }
  }
  if (want_aipw) {
    for (int d : c.degrees) {
      auto est = estimate_aipw(units, plan, nc, d);
      out.curves[{static_cast<int>(EstimatorKind::kAIPW), d}] = est.curve;
    }
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

ordered_json config_to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["dataset"] = dataset_name(c.dataset);
  j["n"] = c.n;
  j["replicates"] = c.replicates;
  j["cloud_points"] = c.cloud_points;
  j["mix"] = c.mix;
  j["p_high"] = c.p_high;
  j["r"] = c.r;
  j["grid"] = {{"min", c.grid.t_min}, {"max", c.grid.t_max}, {"points", c.grid.n_points}};
  j["degrees"] = c.degrees;
  ordered_json nj;
  nj["J"] = c.nuisance.J;
  nj["lambda"] = c.nuisance.lambda;
  nj["eps"] = c.nuisance.eps;
  nj["max_iter"] = c.nuisance.max_iter;
  nj["tol"] = c.nuisance.tol;
  nj["propensity_raw"] = c.nuisance.features.raw;
  nj["propensity_interactions"] = ordered_json::array();
  for (auto [a, b] : c.nuisance.features.interactions)
    nj["propensity_interactions"].push_back({a, b});
  j["nuisance"] = nj;
  j["mis_mu_j"] = c.mis_mu_j;
  j["folds"] = c.folds;
  j["estimators"] = ordered_json::array();
  for (auto e : c.estimators) j["estimators"].push_back(estimator_name(e));
  j["scenario"] = scenario_name(c.scenario);
  j["alpha"] = c.alpha;
  j["bootstrap"] = c.bootstrap;
  j["seed"] = c.seed;
  return j;
}

int expect_int(const ordered_json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return v.get<int>();
}

double expect_real(const ordered_json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  return v.get<double>();
}

std::string expect_string(const ordered_json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + ": expected a string");
  return v.get<std::string>();
}

}  // namespace

std::string dataset_name(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kOrbit:
      return "orbit";
    case DatasetKind::kSynthImage:
      return "synth-image";
    case DatasetKind::kSynthGraph:
      return "synth-graph";
  }
  return "?";
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::kNone:
      return "none";
    case Scenario::kMisPi:
      return "mis-pi";
    case Scenario::kMisMu:
      return "mis-mu";
  }
  return "?";
}

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kPI:
      return "pi";
    case EstimatorKind::kIPW:
      return "ipw";
    case EstimatorKind::kIPWKnown:
      return "ipw-known";
    case EstimatorKind::kAIPW:
      return "aipw";
  }
  return "?";
}

ExperimentConfig default_config(DatasetKind kind) {
  ExperimentConfig c;
  c.dataset = kind;
  c.estimators = {EstimatorKind::kPI, EstimatorKind::kIPW, EstimatorKind::kAIPW};
  c.nuisance.features = PropensityFeatures{{0, 1, 2, 3, 4}, {{1, 2}, {0, 2}}};
  c.nuisance.eps = 0.05;
  c.folds = 5;
  switch (kind) {
    case DatasetKind::kOrbit:
      c.r = 3.0;
      c.grid = SummaryGrid{0.0, 0.2, 201};
      c.degrees = {0, 1};
      c.nuisance.J = 3;
      break;
    case DatasetKind::kSynthImage:
      c.r = 0.1;
      c.grid = SummaryGrid{0.0, 1.0, 201};
      c.degrees = {0};
      c.nuisance.J = 10;
      break;
    case DatasetKind::kSynthGraph:
      c.r = 1.0;
      c.grid = SummaryGrid{0.0, 9.0, 201};
      c.degrees = {1};
      c.nuisance.J = 5;
      break;
  }
  return c;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(source + ": top level must be a JSON object");

  DatasetKind kind = DatasetKind::kOrbit;
  if (j.contains("dataset")) kind = parse_dataset(expect_string(j["dataset"], "dataset"),
                                                  "dataset");
  ExperimentConfig c = default_config(kind);

  for (const auto& [key, value] : j.items()) {
    if (key == "dataset") {
    } else if (key == "n") {
      c.n = expect_int(value, "n");
    } else if (key == "replicates") {
      c.replicates = expect_int(value, "replicates");
    } else if (key == "cloud_points") {
      c.cloud_points = expect_int(value, "cloud_points");
    } else if (key == "mix") {
      c.mix = expect_real(value, "mix");
    } else if (key == "p_high") {
      c.p_high = expect_real(value, "p_high");
    } else if (key == "r") {
      c.r = expect_real(value, "r");
    } else if (key == "grid") {
      if (!value.is_object()) throw ConfigError("grid: expected an object");
      for (const auto& [gk, gv] : value.items()) {
        if (gk == "min")
          c.grid.t_min = expect_real(gv, "grid.min");
        else if (gk == "max")
          c.grid.t_max = expect_real(gv, "grid.max");
        else if (gk == "points")
          c.grid.n_points = expect_int(gv, "grid.points");
        else
          throw ConfigError("grid." + gk + ": unknown key");
      }
    } else if (key == "degrees") {
      if (!value.is_array()) throw ConfigError("degrees: expected an array of integers");
      c.degrees.clear();
      for (const auto& d : value) c.degrees.push_back(expect_int(d, "degrees"));
    } else if (key == "nuisance") {
      if (!value.is_object()) throw ConfigError("nuisance: expected an object");
      for (const auto& [nk, nv] : value.items()) {
        if (nk == "J")
          c.nuisance.J = expect_int(nv, "nuisance.J");
        else if (nk == "lambda")
          c.nuisance.lambda = expect_real(nv, "nuisance.lambda");
        else if (nk == "eps")
          c.nuisance.eps = expect_real(nv, "nuisance.eps");
        else if (nk == "max_iter")
          c.nuisance.max_iter = expect_int(nv, "nuisance.max_iter");
        else if (nk == "tol")
          c.nuisance.tol = expect_real(nv, "nuisance.tol");
        else if (nk == "propensity_raw") {
          if (!nv.is_array()) throw ConfigError("nuisance.propensity_raw: expected an array");
          c.nuisance.features.raw.clear();
          for (const auto& rv : nv)
            c.nuisance.features.raw.push_back(expect_int(rv, "nuisance.propensity_raw"));
        } else if (nk == "propensity_interactions") {
          if (!nv.is_array())
            throw ConfigError("nuisance.propensity_interactions: expected an array of pairs");
          c.nuisance.features.interactions.clear();
          for (const auto& pv : nv) {
            if (!pv.is_array() || pv.size() != 2)
              throw ConfigError("nuisance.propensity_interactions: each entry is a pair");
            c.nuisance.features.interactions.emplace_back(
                expect_int(pv[0], "nuisance.propensity_interactions"),
                expect_int(pv[1], "nuisance.propensity_interactions"));
          }
        } else {
          throw ConfigError("nuisance." + nk + ": unknown key");
        }
      }
    } else if (key == "mis_mu_j") {
      c.mis_mu_j = expect_int(value, "mis_mu_j");
    } else if (key == "folds") {
      c.folds = expect_int(value, "folds");
    } else if (key == "estimators") {
      if (!value.is_array()) throw ConfigError("estimators: expected an array of names");
      c.estimators.clear();
      for (const auto& ev : value)
        c.estimators.push_back(parse_estimator(expect_string(ev, "estimators"), "estimators"));
    } else if (key == "scenario") {
      c.scenario = parse_scenario(expect_string(value, "scenario"), "scenario");
    } else if (key == "alpha") {
      c.alpha = expect_real(value, "alpha");
    } else if (key == "bootstrap") {
      c.bootstrap = expect_int(value, "bootstrap");
    } else if (key == "seed") {
      if (!value.is_number_unsigned() && !value.is_number_integer())
        throw ConfigError("seed: expected a nonnegative integer");
      c.seed = value.get<uint64_t>();
    } else {
      throw ConfigError(source + ": unknown key '" + key + "'");
    }
  }
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text, path);
}

std::string config_json(const ExperimentConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

StudyPool build_pool(const ExperimentConfig& config) {
  validate_config(config);
  return silhouettes_of(config, raw_pairs(config));
}

std::vector<CausalSample> draw_replicate(const ExperimentConfig& config, const StudyPool& pool,
                                         int replicate) {
  if (pool.y0.size() != static_cast<size_t>(config.n))
    throw std::invalid_argument("pool size does not match the configured n");
  auto xs = gen_covariates(config.n, derive_seed(config.seed, kCovTag, replicate));
  std::vector<double> probs(config.n);
  for (int i = 0; i < config.n; ++i) probs[i] = true_propensity(xs[i]);
  auto a = assign_treatment(probs, derive_seed(config.seed, kTreatTag, replicate));
  std::vector<CausalSample> units(config.n);
  for (int i = 0; i < config.n; ++i) {
    units[i].x = std::move(xs[i]);
    units[i].a = a[i];
    units[i].y = a[i] ? pool.y1[i] : pool.y0[i];
  }
  return units;
}

RawStudy raw_study(const ExperimentConfig& config, int replicate) {
  validate_config(config);
  RawStudy study;
  study.pairs = raw_pairs(config);
  study.x = gen_covariates(config.n, derive_seed(config.seed, kCovTag, replicate));
  std::vector<double> probs(config.n);
  for (int i = 0; i < config.n; ++i) probs[i] = true_propensity(study.x[i]);
  study.a = assign_treatment(probs, derive_seed(config.seed, kTreatTag, replicate));
  return study;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  ExperimentReport report;
  report.config = config;

  auto t0 = std::chrono::steady_clock::now();
  auto pairs = raw_pairs(config);
  report.timings["generate"] = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  StudyPool pool = silhouettes_of(config, pairs);
  report.timings["silhouettes"] = seconds_since(t0);
  report.truth = pool.truth;
  report.rips_fallbacks = pool.rips_fallbacks;

  t0 = std::chrono::steady_clock::now();
  std::map<std::pair<int, int>, std::vector<std::vector<double>>> curves;
  for (int rep = 0; rep < config.replicates; ++rep) {
    try {
      auto result = run_replicate(config, pool, rep);
      for (auto& [key, curve] : result.curves) curves[key].push_back(std::move(curve));
    } catch (const std::exception& e) {
      report.failed_replicates.emplace_back(rep, e.what());
    }
  }
  report.timings["estimation"] = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  for (EstimatorKind kind : config.estimators) {
    for (int d : config.degrees) {
      auto it = curves.find({static_cast<int>(kind), d});
      if (it == curves.end()) continue;
      const auto& reps = it->second;
      EstimatorSummary s;
      s.kind = kind;
      s.degree = d;
      s.replicate_curves = reps;
      s.mean_curve.assign(config.grid.n_points, 0.0);
      for (const auto& curve : reps)
        for (int t = 0; t < config.grid.n_points; ++t) s.mean_curve[t] += curve[t] / reps.size();
      s.band_sd.assign(config.grid.n_points, 0.0);
      if (reps.size() >= 2) {
        for (const auto& curve : reps)
          for (int t = 0; t < config.grid.n_points; ++t) {
            const double dev = curve[t] - s.mean_curve[t];
            s.band_sd[t] += dev * dev / (reps.size() - 1);
          }
        for (double& v : s.band_sd) v = std::sqrt(v);
        s.spread = std_summary(reps);
      }
      s.l1 = l1_distance(config.grid, s.mean_curve, report.truth.at(d));
      report.summaries.push_back(std::move(s));
    }
  }
  report.timings["scoring"] = seconds_since(t0);
  if (report.summaries.empty())
    throw std::runtime_error("every replicate failed; no estimates to report");
  return report;
}

std::map<int, TestReport> run_test(const ExperimentConfig& config) {
  validate_config(config);
  StudyPool pool = build_pool(config);
  auto units = draw_replicate(config, pool, 0);
  const NuisanceConfig nc = scenario_nuisance(config);
  FoldPlan plan = usable_plan(
      units, make_folds(config.n, config.folds, derive_seed(config.seed, kFoldTag, 0)),
      config.folds);
  std::map<int, TestReport> reports;
  for (int d : config.degrees) {
    auto est = estimate_aipw(units, plan, nc, d);
    reports[d] = sup_test(est, config.alpha, config.bootstrap, Multiplier::kRademacher,
                          derive_seed(config.seed, kTestTag, d));
  }
  return reports;
}

void emit_report(const ExperimentReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto& c = report.config;

  std::string summary = "dataset,degree,estimator,l1_dist,std\n";
  for (const auto& s : report.summaries) {
    summary += dataset_name(c.dataset) + "," + std::to_string(s.degree) + "," +
               estimator_name(s.kind) + "," + format_double(s.l1) + "," +
               format_double(s.spread) + "\n";
  }
  write_text(out_dir + "/summary.csv", summary);

  for (const auto& s : report.summaries) {
    std::string band = "t,truth,mean,lower,upper\n";
    const auto& truth = report.truth.at(s.degree);
    for (int t = 0; t < c.grid.n_points; ++t) {
      band += format_double(c.grid.at(t)) + "," + format_double(truth[t]) + "," +
              format_double(s.mean_curve[t]) + "," +
              format_double(s.mean_curve[t] - s.band_sd[t]) + "," +
              format_double(s.mean_curve[t] + s.band_sd[t]) + "\n";
    }
    write_text(out_dir + "/band_" + estimator_name(s.kind) + "_d" + std::to_string(s.degree) +
                   ".csv",
               band);
  }

  ordered_json j;
  j["config"] = config_to_json(c);
  j["rips_fallbacks"] = report.rips_fallbacks;
  j["truth"] = ordered_json::object();
  for (const auto& [d, curve] : report.truth) j["truth"][std::to_string(d)] = curve;
  j["summaries"] = ordered_json::array();
  for (const auto& s : report.summaries) {
    ordered_json sj;
    sj["estimator"] = estimator_name(s.kind);
    sj["degree"] = s.degree;
    sj["l1_dist"] = s.l1;
    sj["std"] = s.spread;
    sj["mean_curve"] = s.mean_curve;
    sj["band_sd"] = s.band_sd;
    j["summaries"].push_back(sj);
  }
  j["failed_replicates"] = ordered_json::array();
  for (const auto& [rep, what] : report.failed_replicates)
    j["failed_replicates"].push_back({{"replicate", rep}, {"error", what}});
  write_text(out_dir + "/report.json", j.dump(2) + "\n");

  write_text(out_dir + "/config.json", config_json(c));

  std::string timings = "stage,seconds\n";
  for (const auto& [stage, secs] : report.timings)
    timings += stage + "," + format_double(secs) + "\n";
  write_text(out_dir + "/timings.csv", timings);
}

BenchReport benchmark_runtime(const ExperimentConfig& config) {
  validate_config(config);
  BenchReport bench;
  const auto total0 = std::chrono::steady_clock::now();

  auto t0 = std::chrono::steady_clock::now();
  auto pairs = raw_pairs(config);
  bench.stage_seconds.emplace_back("generate", seconds_since(t0));

  const PipelineConfig pipe = pipeline_config(config);
  const int max_degree = *std::max_element(config.degrees.begin(), config.degrees.end());
  double filtration_s = 0, persistence_s = 0, silhouette_s = 0;
  StudyPool pool;
  pool.y0.resize(pairs.size());
  pool.y1.resize(pairs.size());
  for (size_t i = 0; i < pairs.size(); ++i) {
    const std::array<const Outcome*, 2> arms = {&pairs[i].y0, &pairs[i].y1};
    for (int arm = 0; arm < 2; ++arm) {
      t0 = std::chrono::steady_clock::now();
      FilteredComplex fc;
      if (std::holds_alternative<PointCloud>(*arms[arm])) {
        const auto& cloud = std::get<PointCloud>(*arms[arm]);
        fc = pipe.filtration == Filtration::kRips
                 ? build_rips(cloud, pipe.rips_max_dim, pipe.rips_max_radius)
                 : build_alpha_2d(cloud);
      } else if (std::holds_alternative<ImageGrid>(*arms[arm])) {
        fc = build_cubical_sublevel(std::get<ImageGrid>(*arms[arm]));
      } else {
        fc = build_graph_sublevel(std::get<NodeWeightedGraph>(*arms[arm]));
      }
      pool.rips_fallbacks += fc.rips_fallback;
      filtration_s += seconds_since(t0);

      t0 = std::chrono::steady_clock::now();
      auto dgs = compute_persistence(fc, max_degree);
      persistence_s += seconds_since(t0);

      t0 = std::chrono::steady_clock::now();
      const uint64_t unit_index = 2 * i + arm;
      auto& store = arm ? pool.y1[i] : pool.y0[i];
      for (int d : pipe.degrees) {
        CapSpec spec;
        for (const auto& [cd, cs] : pipe.caps)
          if (cd == d) spec = cs;
        if (spec.mode == CapMode::kUniform)
          spec.seed =
              derive_seed(pipe.seed, 0x6361700000ULL + static_cast<uint64_t>(d), unit_index);
        const PersistenceDiagram capped = cap_infinite_deaths(dgs[d], spec);
        store[d] = silhouette(capped, pipe.r, pipe.grid);
      }
      silhouette_s += seconds_since(t0);
    }
  }
  bench.stage_seconds.emplace_back("filtration", filtration_s);
  bench.stage_seconds.emplace_back("persistence", persistence_s);
  bench.stage_seconds.emplace_back("silhouette", silhouette_s);

  t0 = std::chrono::steady_clock::now();
  (void)run_replicate(config, pool, 0);
  bench.stage_seconds.emplace_back("estimation", seconds_since(t0));

  bench.total_seconds = seconds_since(total0);
  return bench;
}

}  // namespace tate
