#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tate/datagen.hpp"
#include "tate/estimators.hpp"
#include "tate/summary.hpp"

namespace tate {

enum class DatasetKind { kOrbit, kSynthImage, kSynthGraph };
enum class Scenario { kNone, kMisPi, kMisMu };

std::string dataset_name(DatasetKind kind);
std::string scenario_name(Scenario s);
std::string estimator_name(EstimatorKind kind);

// Raised by configuration loading/validation; the CLI maps it to exit code 2.
// The message carries a dotted key path into the offending entry.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  DatasetKind dataset = DatasetKind::kOrbit;
  int n = 300;
  int replicates = 20;
  int cloud_points = 300;  // orbit clouds
  double mix = 0.75;       // image/graph treated-pool fraction
  double p_high = 0.7;     // orbit: higher-parameter cloud goes to y1
  double r = 1.0;
  SummaryGrid grid;
  std::vector<int> degrees;
  NuisanceConfig nuisance;
  int mis_mu_j = 2;  // outcome basis size under the mis-mu scenario
  int folds = 5;
  std::vector<EstimatorKind> estimators;
  Scenario scenario = Scenario::kNone;
  double alpha = 0.05;
  int bootstrap = 1000;
  uint64_t seed = 1;

  bool operator==(const ExperimentConfig&) const = default;
};

// Per-dataset defaults (grids, weight powers, degrees, cap policy).
ExperimentConfig default_config(DatasetKind kind);

// JSON round trip. parse_config starts from the dataset's defaults and
// overlays the provided keys; unknown keys are errors.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& source);
std::string config_json(const ExperimentConfig& config);

// One fully generated study: the fixed counterfactual pool's silhouettes plus
// the per-degree truth curves (mean of y1 - y0 silhouettes over the pool).
struct StudyPool {
  std::vector<std::map<int, SilhouetteCurve>> y0, y1;  // per unit, per degree
  std::map<int, std::vector<double>> truth;
  int rips_fallbacks = 0;
};

StudyPool build_pool(const ExperimentConfig& config);

// Observed units for one replicate: covariates and treatment are redrawn,
// outcomes looked up from the fixed pool.
std::vector<CausalSample> draw_replicate(const ExperimentConfig& config, const StudyPool& pool,
                                         int replicate);

// Raw form of one replicate, before any filtration: covariates, assignments,
// and the counterfactual outcome pair of every unit. Shares the experiment's
// seed streams, so replicate k here matches replicate k of run_experiment.
struct RawStudy {
  std::vector<std::vector<double>> x;
  std::vector<int> a;
  std::vector<RawOutcomePair> pairs;
};

RawStudy raw_study(const ExperimentConfig& config, int replicate);

struct EstimatorSummary {
  EstimatorKind kind = EstimatorKind::kPI;
  int degree = 0;
  std::vector<double> mean_curve;
  std::vector<double> band_sd;  // pointwise std across replicates
  double l1 = 0.0;
  double spread = 0.0;  // std_summary over replicate curves
  std::vector<std::vector<double>> replicate_curves;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::map<int, std::vector<double>> truth;
  std::vector<EstimatorSummary> summaries;
  std::vector<std::pair<int, std::string>> failed_replicates;
  int rips_fallbacks = 0;
  std::map<std::string, double> timings;  // seconds per stage
};

ExperimentReport run_experiment(const ExperimentConfig& config);

// Single-dataset AIPW + sup test for every configured degree.
std::map<int, TestReport> run_test(const ExperimentConfig& config);

// Writes summary.csv, report.json, config.json, per-curve band CSVs, and
// timings.csv (the only file allowed to differ between identical runs).
void emit_report(const ExperimentReport& report, const std::string& out_dir);

struct BenchReport {
  std::vector<std::pair<std::string, double>> stage_seconds;
  double total_seconds = 0.0;
};

BenchReport benchmark_runtime(const ExperimentConfig& config);

}  // namespace tate
