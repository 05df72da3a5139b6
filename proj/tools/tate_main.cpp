#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tate/harness.hpp"
#include "tate/io.hpp"
#include "tate/metrics.hpp"
#include "tate/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace tate;

namespace {

struct ConfigFlags {
  std::string config_path;
  std::string dataset = "orbit";
  std::optional<int> n, replicates, cloud_points, folds, bootstrap;
  std::optional<double> mix, p_high, alpha;
  std::optional<uint64_t> seed;
  std::optional<std::string> scenario;
};

void add_config_flags(CLI::App* sub, ConfigFlags& f) {
  sub->add_option("--config", f.config_path, "JSON config file; flags override its entries")
      ->check(CLI::ExistingFile);
  sub->add_option("--dataset", f.dataset, "orbit, synth-image, or synth-graph")
      ->default_str("orbit");
  sub->add_option("--n", f.n, "units per replicate");
  sub->add_option("--replicates", f.replicates, "independent treatment redraws");
  sub->add_option("--cloud-points", f.cloud_points, "points per orbit cloud");
  sub->add_option("--folds", f.folds, "cross-fitting folds");
  sub->add_option("--bootstrap", f.bootstrap, "multiplier bootstrap draws");
  sub->add_option("--mix", f.mix, "treated-pool alteration fraction");
  sub->add_option("--p-high", f.p_high, "orbit: chance the higher-parameter cloud is treated");
  sub->add_option("--alpha", f.alpha, "test level");
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--scenario", f.scenario, "none, mis-pi, or mis-mu");
}

ExperimentConfig resolve_config(const ConfigFlags& f) {
  ordered_json j;
  if (!f.config_path.empty()) {
    j = ordered_json::parse(config_json(load_config(f.config_path)));
  } else {
    j["dataset"] = f.dataset;
  }
  if (f.n) j["n"] = *f.n;
  if (f.replicates) j["replicates"] = *f.replicates;
  if (f.cloud_points) j["cloud_points"] = *f.cloud_points;
  if (f.folds) j["folds"] = *f.folds;
  if (f.bootstrap) j["bootstrap"] = *f.bootstrap;
  if (f.mix) j["mix"] = *f.mix;
  if (f.p_high) j["p_high"] = *f.p_high;
  if (f.alpha) j["alpha"] = *f.alpha;
  if (f.seed) j["seed"] = *f.seed;
  if (f.scenario) j["scenario"] = *f.scenario;
  return parse_config(j.dump(), f.config_path.empty() ? "command line" : f.config_path);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

void emit_json(const ordered_json& j, const std::string& out_path) {
  if (out_path.empty())
    std::cout << j.dump(2) << "\n";
  else
    write_text_file(out_path, j.dump(2) + "\n");
}

int run_gen_data(const ConfigFlags& flags, const std::string& out_dir, int replicate) {
  const ExperimentConfig c = resolve_config(flags);
  const RawStudy study = raw_study(c, replicate);
  fs::create_directories(out_dir);

  std::string cov = "x0,x1,x2,x3,x4\n";
  for (const auto& row : study.x) {
    for (size_t k = 0; k < row.size(); ++k)
      cov += (k ? "," : "") + format_double(row[k]);
    cov += "\n";
  }
  write_text_file(out_dir + "/covariates.csv", cov);

  std::string treat = "a\n";
  for (int a : study.a) treat += std::to_string(a) + "\n";
  write_text_file(out_dir + "/treatment.csv", treat);

  std::string format;
  std::vector<std::string> files;
  files.reserve(study.pairs.size());
  for (int i = 0; i < c.n; ++i) {
    const Outcome& o = study.a[i] ? study.pairs[i].y1 : study.pairs[i].y0;
    char name[32];
    std::snprintf(name, sizeof(name), "outcome_%04d.csv", i);
    const std::string path = out_dir + "/" + name;
    if (std::holds_alternative<PointCloud>(o)) {
      format = "cloud";
      write_point_cloud_csv(path, std::get<PointCloud>(o));
    } else if (std::holds_alternative<ImageGrid>(o)) {
      format = "image";
      write_image_csv(path, std::get<ImageGrid>(o));
    } else {
      format = "graph";
      write_graph_csv(path, std::get<NodeWeightedGraph>(o));
    }
    files.emplace_back(name);
  }

  ordered_json manifest;
  manifest["dataset"] = dataset_name(c.dataset);
  manifest["format"] = format;
  manifest["n"] = c.n;
  manifest["replicate"] = replicate;
  manifest["seed"] = c.seed;
  if (c.dataset == DatasetKind::kOrbit) {
    manifest["cloud_points"] = c.cloud_points;
    manifest["p_high"] = c.p_high;
  } else {
    manifest["mix"] = c.mix;
  }
  manifest["covariates"] = "covariates.csv";
  manifest["treatment"] = "treatment.csv";
  manifest["outcomes"] = files;
  write_text_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");
  std::cout << "wrote " << c.n << " " << format << " outcomes to " << out_dir << "\n";
  return 0;
}

int run_persist(const std::string& input, const std::string& format,
                const std::string& filtration, int max_hom, double max_radius,
                const std::string& out_path) {
  FilteredComplex fc;
  if (format == "cloud") {
    const PointCloud cloud = read_point_cloud_csv(input);
    if (filtration == "rips")
      fc = build_rips(cloud, max_hom + 1, max_radius);
    else if (filtration == "alpha")
      fc = build_alpha_2d(cloud);
    else
      throw ConfigError("filtration: clouds support alpha or rips, got '" + filtration + "'");
  } else if (format == "image" || format == "pgm") {
    fc = build_cubical_sublevel(format == "pgm" ? read_pgm(input) : read_image_csv(input));
  } else if (format == "graph") {
    fc = build_graph_sublevel(read_graph_csv(input));
  } else {
    throw ConfigError("format: expected cloud, image, pgm, or graph, got '" + format + "'");
  }
  const auto diagrams = compute_persistence(fc, max_hom);
  write_diagram_csv(out_path, diagrams);
  size_t features = 0;
  for (const auto& d : diagrams) features += d.points.size();
  std::cout << "wrote " << features << " features across " << diagrams.size()
            << " degrees to " << out_path;
  if (fc.rips_fallback) std::cout << " (degenerate cloud: fell back to Rips)";
  std::cout << "\n";
  return 0;
}

int run_silhouette(const std::string& input, int degree, double r, const SummaryGrid& grid,
                   const std::string& cap_mode, double cap_value, double cap_lo, double cap_hi,
                   uint64_t cap_seed, const std::string& out_prefix) {
  const auto diagrams = read_diagram_csv(input);
  if (degree < 0 || degree >= static_cast<int>(diagrams.size()))
    throw ConfigError("degree: the diagram file has no features of degree " +
                      std::to_string(degree));
  CapSpec spec;
  if (cap_mode == "drop") {
    spec.mode = CapMode::kDrop;
  } else if (cap_mode == "fixed") {
    spec.mode = CapMode::kFixed;
    spec.cap = cap_value;
  } else if (cap_mode == "uniform") {
    spec.mode = CapMode::kUniform;
    spec.lo = cap_lo;
    spec.hi = cap_hi;
    spec.seed = cap_seed;
  } else {
    throw ConfigError("cap: expected drop, fixed, or uniform, got '" + cap_mode + "'");
  }
  const PersistenceDiagram capped = cap_infinite_deaths(diagrams[degree], spec);
  const SilhouetteCurve curve = silhouette(capped, r, grid);
  write_curve_csv(out_prefix + ".csv", curve);
  write_curve_json(out_prefix + ".json", curve, degree);
  std::cout << "wrote " << out_prefix << ".csv and " << out_prefix << ".json\n";
  return 0;
}

int run_distance(const std::string& path_a, const std::string& path_b, int degree, double q,
                 bool certificate, double r, const SummaryGrid& grid,
                 const std::string& out_path) {
  const auto da = read_diagram_csv(path_a);
  const auto db = read_diagram_csv(path_b);
  PersistenceDiagram A, B;
  if (degree < static_cast<int>(da.size())) A = da[degree];
  if (degree < static_cast<int>(db.size())) B = db[degree];
  for (const auto& p : A.points)
    if (p.death == kInfDeath)
      throw ConfigError("diagram " + path_a + " has immortal features; cap them first");
  for (const auto& p : B.points)
    if (p.death == kInfDeath)
      throw ConfigError("diagram " + path_b + " has immortal features; cap them first");

  const auto [dist, matching] = wasserstein(A, B, q);
  ordered_json j;
  j["degree"] = degree;
  j["q"] = q;
  j["distance"] = dist;
  j["matching"] = ordered_json::array();
  for (auto [i, k] : matching.pairs) j["matching"].push_back({i, k});
  if (certificate) {
    const StabilityCertificate cert = stability_check(A, B, r, grid);
    j["certificate"] = {{"r", r},           {"w1", cert.w1},
                        {"sup_diff", cert.sup_diff}, {"L", cert.L},
                        {"c", cert.c},      {"bound", cert.bound},
                        {"satisfied", cert.satisfied}};
  }
  emit_json(j, out_path);
  return 0;
}

int run_estimate(const ConfigFlags& flags, const std::string& estimator, int degree_flag,
                 int replicate, const std::string& out_dir) {
  ExperimentConfig c = resolve_config(flags);
  const StudyPool pool = build_pool(c);
  const auto units = draw_replicate(c, pool, replicate);
  const int degree = degree_flag >= 0 ? degree_flag : c.degrees.front();
  if (std::find(c.degrees.begin(), c.degrees.end(), degree) == c.degrees.end())
    throw ConfigError("degree: " + std::to_string(degree) +
                      " is not among the configured degrees");

  NuisanceConfig nc = c.nuisance;
  if (c.scenario == Scenario::kMisPi) nc.features = PropensityFeatures{{0, 2}, {}};
  if (c.scenario == Scenario::kMisMu) nc.J = c.mis_mu_j;

  EffectEstimate est;
  if (estimator == "aipw") {
    FoldPlan plan = make_folds(c.n, c.folds, derive_seed(c.seed, 0x666f6c64ULL, replicate));
    est = estimate_aipw(units, plan, nc, degree);
  } else if (estimator == "pi") {
    est = estimate_pi(units, fit_outcome(units, degree, nc.J, nc.lambda), degree);
  } else if (estimator == "ipw") {
    est = estimate_ipw(units, fit_propensity(units, nc.features, nc.eps, nc.max_iter, nc.tol),
                       degree);
  } else {
    throw ConfigError("estimator: expected pi, ipw, or aipw, got '" + estimator + "'");
  }

  ordered_json j;
  j["estimator"] = estimator;
  j["dataset"] = dataset_name(c.dataset);
  j["scenario"] = scenario_name(c.scenario);
  j["degree"] = degree;
  j["n"] = est.n;
  j["replicate"] = replicate;
  j["seed"] = c.seed;
  j["grid"] = {{"min", c.grid.t_min}, {"max", c.grid.t_max}, {"points", c.grid.n_points}};
  j["curve"] = est.curve;
  std::vector<double> se;
  if (est.if_matrix.size() > 0) {
    se = covariance(est).se;
    j["se"] = se;
  } else {
    j["se"] = nullptr;
  }

  fs::create_directories(out_dir);
  write_text_file(out_dir + "/estimate.json", j.dump(2) + "\n");
  std::string csv = se.empty() ? "t,estimate\n" : "t,estimate,se\n";
  for (int t = 0; t < c.grid.n_points; ++t) {
    csv += format_double(c.grid.at(t)) + "," + format_double(est.curve[t]);
    if (!se.empty()) csv += "," + format_double(se[t]);
    csv += "\n";
  }
  write_text_file(out_dir + "/estimate.csv", csv);
  std::cout << "wrote " << out_dir << "/estimate.json and " << out_dir << "/estimate.csv\n";
  return 0;
}

int run_sup_test(const ConfigFlags& flags, const std::string& out_path) {
  const ExperimentConfig c = resolve_config(flags);
  const auto reports = run_test(c);
  ordered_json j;
  j["dataset"] = dataset_name(c.dataset);
  j["seed"] = c.seed;
  j["degrees"] = ordered_json::array();
  for (const auto& [degree, rep] : reports) {
    j["degrees"].push_back({{"degree", degree},
                            {"t_n", rep.t_n},
                            {"critical", rep.critical},
                            {"alpha", rep.alpha},
                            {"bootstrap", rep.b},
                            {"reject", rep.reject}});
  }
  emit_json(j, out_path);
  return 0;
}

int run_experiment_cmd(const ConfigFlags& flags, const std::string& out_dir) {
  const ExperimentConfig c = resolve_config(flags);
  const ExperimentReport report = run_experiment(c);
  emit_report(report, out_dir);
  std::cout << "dataset,degree,estimator,l1_dist,std\n";
  for (const auto& s : report.summaries)
    std::cout << dataset_name(c.dataset) << "," << s.degree << "," << estimator_name(s.kind)
              << "," << format_double(s.l1) << "," << format_double(s.spread) << "\n";
  if (!report.failed_replicates.empty())
    std::cerr << report.failed_replicates.size() << " replicate(s) failed; see report.json\n";
  std::cout << "report written to " << out_dir << "\n";
  return 0;
}

int run_bench(const ConfigFlags& flags, const std::string& out_path) {
  const ExperimentConfig c = resolve_config(flags);
  const BenchReport bench = benchmark_runtime(c);
  std::string table = "stage,seconds\n";
  for (const auto& [stage, secs] : bench.stage_seconds)
    table += stage + "," + format_double(secs) + "\n";
  table += "total," + format_double(bench.total_seconds) + "\n";
  if (out_path.empty())
    std::cout << table;
  else
    write_text_file(out_path, table);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Topological treatment-effect toolkit: filtrations, persistence, silhouettes,\n"
      "Wasserstein distances, and causal effect estimation on topological summaries."};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "accepted for compatibility; execution is single-threaded");

  ConfigFlags gen_flags;
  std::string gen_out = "dataset";
  int gen_replicate = 0;
  auto* gen = app.add_subcommand("gen-data", "Write one replicate's observed data to a directory");
  add_config_flags(gen, gen_flags);
  gen->add_option("--replicate", gen_replicate, "replicate index for the treatment redraw");
  gen->add_option("--out", gen_out, "output directory")->default_str("dataset");

  std::string p_input, p_format = "cloud", p_filtration = "alpha", p_out = "diagram.csv";
  int p_max_hom = 1;
  double p_max_radius = 1.0;
  auto* persist = app.add_subcommand("persist", "Compute a persistence diagram from an outcome");
  persist->add_option("--input", p_input, "outcome file")->required()->check(CLI::ExistingFile);
  persist->add_option("--format", p_format, "cloud, image, pgm, or graph")->default_str("cloud");
  persist->add_option("--filtration", p_filtration, "alpha or rips (clouds only)")
      ->default_str("alpha");
  persist->add_option("--max-hom", p_max_hom, "largest homology degree to report");
  persist->add_option("--max-radius", p_max_radius, "Rips radius cutoff");
  persist->add_option("--out", p_out, "diagram CSV path")->default_str("diagram.csv");

  std::string s_input, s_cap = "drop", s_out = "curve";
  int s_degree = 1;
  double s_r = 1.0, s_cap_value = 0.0, s_cap_lo = 0.0, s_cap_hi = 1.0;
  uint64_t s_cap_seed = 0;
  SummaryGrid s_grid;
  auto* sil = app.add_subcommand("silhouette", "Weighted silhouette of a persistence diagram");
  sil->add_option("--input", s_input, "diagram CSV")->required()->check(CLI::ExistingFile);
  sil->add_option("--degree", s_degree, "homology degree");
  sil->add_option("--r", s_r, "persistence weight power");
  sil->add_option("--grid-min", s_grid.t_min, "grid start");
  sil->add_option("--grid-max", s_grid.t_max, "grid end");
  sil->add_option("--grid-points", s_grid.n_points, "grid size");
  sil->add_option("--cap", s_cap, "immortal features: drop, fixed, or uniform")
      ->default_str("drop");
  sil->add_option("--cap-value", s_cap_value, "death value under --cap fixed");
  sil->add_option("--cap-lo", s_cap_lo, "uniform cap lower bound");
  sil->add_option("--cap-hi", s_cap_hi, "uniform cap upper bound");
  sil->add_option("--cap-seed", s_cap_seed, "uniform cap seed");
  sil->add_option("--out", s_out, "output prefix for .csv and .json")->default_str("curve");

  std::string d_a, d_b, d_out;
  int d_degree = 1;
  double d_q = 1.0, d_r = 1.0;
  bool d_cert = false;
  SummaryGrid d_grid;
  auto* dist = app.add_subcommand("distance", "Wasserstein distance between two diagrams");
  dist->add_option("--a", d_a, "first diagram CSV")->required()->check(CLI::ExistingFile);
  dist->add_option("--b", d_b, "second diagram CSV")->required()->check(CLI::ExistingFile);
  dist->add_option("--degree", d_degree, "homology degree");
  dist->add_option("--q", d_q, "Wasserstein order");
  dist->add_flag("--certificate", d_cert, "also check the silhouette stability bound");
  dist->add_option("--r", d_r, "weight power for the certificate");
  dist->add_option("--grid-min", d_grid.t_min, "certificate grid start");
  dist->add_option("--grid-max", d_grid.t_max, "certificate grid end");
  dist->add_option("--grid-points", d_grid.n_points, "certificate grid size");
  dist->add_option("--out", d_out, "write the JSON here instead of stdout");

  ConfigFlags e_flags;
  std::string e_estimator = "aipw", e_out = "estimate";
  int e_degree = -1, e_replicate = 0;
  auto* est = app.add_subcommand("estimate", "One effect-curve estimate on one replicate");
  add_config_flags(est, e_flags);
  est->add_option("--estimator", e_estimator, "pi, ipw, or aipw")->default_str("aipw");
  est->add_option("--degree", e_degree, "homology degree (default: first configured)");
  est->add_option("--replicate", e_replicate, "replicate index");
  est->add_option("--out", e_out, "output directory")->default_str("estimate");

  ConfigFlags t_flags;
  std::string t_out;
  auto* test = app.add_subcommand("test", "Sup-norm bootstrap test of a zero effect curve");
  add_config_flags(test, t_flags);
  test->add_option("--out", t_out, "write the JSON here instead of stdout");

  ConfigFlags x_flags;
  std::string x_out = "results";
  auto* exp = app.add_subcommand("experiment", "Full replicated comparison of the estimators");
  add_config_flags(exp, x_flags);
  exp->add_option("--out", x_out, "output directory")->default_str("results");

  ConfigFlags b_flags;
  std::string b_out;
  auto* bench = app.add_subcommand("bench", "Stage-by-stage runtime of one experiment pass");
  add_config_flags(bench, b_flags);
  bench->add_option("--out", b_out, "write the CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return run_gen_data(gen_flags, gen_out, gen_replicate);
    if (persist->parsed())
      return run_persist(p_input, p_format, p_filtration, p_max_hom, p_max_radius, p_out);
    if (sil->parsed()) {
      validate(s_grid);
      return run_silhouette(s_input, s_degree, s_r, s_grid, s_cap, s_cap_value, s_cap_lo,
                            s_cap_hi, s_cap_seed, s_out);
    }
    if (dist->parsed()) {
      if (d_cert) validate(d_grid);
      return run_distance(d_a, d_b, d_degree, d_q, d_cert, d_r, d_grid, d_out);
    }
    if (est->parsed()) return run_estimate(e_flags, e_estimator, e_degree, e_replicate, e_out);
    if (test->parsed()) return run_sup_test(t_flags, t_out);
    if (exp->parsed()) return run_experiment_cmd(x_flags, x_out);
    if (bench->parsed()) return run_bench(b_flags, b_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
