// Command-line front end: synth, simulate, sweep, diagnose, cluster, morris.
// Exit codes: 0 success, 2 usage or configuration errors, 3 data or numeric
// errors.  Every failure prints "ERR <Name>: <detail>" on stderr.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coadapt/coadapt.hpp"

namespace fs = std::filesystem;
using namespace coadapt;

namespace {

bool is_usage_error(const std::string& name) {
  return name == "SchemaError" || name == "FileNotFound" || name == "InvalidArgument" ||
         name == "OutOfBounds" || name == "UnknownVariable" || name == "InvalidPrior";
}

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> do_specs;
  int workers = -1;
};

// "--do name=value[,name=value...]": bare names pin policy coordinates (a
// causal intervention: the feedback edge into the policy is removed); dotted
// paths patch the configuration before parsing.
void split_do_specs(const std::vector<std::string>& specs, DoPins& pins,
                    std::vector<std::pair<std::string, double>>& overrides) {
  for (const auto& spec : specs) {
    std::size_t start = 0;
    while (start <= spec.size()) {
      std::size_t end = spec.find(',', start);
      if (end == std::string::npos) end = spec.size();
      const std::string item = spec.substr(start, end - start);
      start = end + 1;
      if (item.empty()) continue;
      const std::size_t eq = item.find('=');
      if (eq == std::string::npos || eq == 0)
        throw InvalidArgument("--do expects name=value, got '" + item + "'");
      const std::string name = item.substr(0, eq);
      const double value = parse_double(item.substr(eq + 1));
      if (name.find('.') != std::string::npos)
        overrides.emplace_back(name, value);
      else
        pins.emplace_back(name, value);
    }
  }
}

json load_patched_json(const CommonOpts& o,
                       const std::vector<std::pair<std::string, double>>& overrides) {
  json raw = load_json_file(o.config_path);
  for (const auto& [path, v] : overrides) set_by_path(raw, path, v);
  if (o.seed) raw["sim"]["seed"] = *o.seed;
  return raw;
}

void ensure_out_dir(const std::string& out) {
  if (out.empty()) throw InvalidArgument("--out is required");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw DataError("cannot create output directory " + out);
}

std::string rep_filename(int rep) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run_%04d.csv", rep);
  return buf;
}

// --- simulate ---------------------------------------------------------------

int cmd_simulate(const CommonOpts& o) {
  DoPins pins;
  std::vector<std::pair<std::string, double>> overrides;
  split_do_specs(o.do_specs, pins, overrides);
  const SimConfig cfg = parse_config(load_patched_json(o, overrides));
  const ReplicateSummary sum = replicate(cfg, pins, o.workers);
  ensure_out_dir(o.out);
  for (const auto& r : sum.runs) write_run_csv(fs::path(o.out) / rep_filename(r.rep), r);
  json j = summary_json(cfg, sum);
  if (!pins.empty()) {
    j["do"] = json::object();
    for (const auto& [name, v] : pins) j["do"][name] = v;
  }
  write_json_file(fs::path(o.out) / "summary.json", j);
  std::cout << j.dump(2) << "\n";
  return 0;
}

// --- synth --------------------------------------------------------------------

int cmd_synth(const std::string& marginals, const std::string& microdata, int n,
              std::uint64_t seed, const std::string& out, const std::string& config_path,
              double tol, int max_iter) {
  auto constraints = load_marginals_csv(marginals);
  std::vector<std::string> dims;
  for (const auto& c : constraints) dims.push_back(c.dimension);
  const SeedSample sample = load_microdata_csv(microdata, dims);
  const IpfResult ipf = ipf_fit(sample, constraints, tol, max_iter);

  SyntheticPopulation pop =
      sample_population(ipf.weights, sample, n, split_seed(seed, 0x01));
  impute_missing(pop, sample, split_seed(seed, 0x02));

  AttributePrior theta = point_prior("theta", 1.0);
  AttributePrior eta = point_prior("eta", 0.0);
  if (!config_path.empty()) {
    const SimConfig cfg = load_config(config_path);
    theta = cfg.theta_prior;
    eta = cfg.eta_prior;
  }
  draw_behavioral_attributes(pop, theta, eta, split_seed(seed, 0x03));

  write_population_csv(out, pop);
  json j;
  j["agents"] = n;
  j["ipf_sweeps"] = ipf.sweeps;
  j["ipf_residual"] = ipf.residual;
  j["out"] = out;
  j["warnings"] = ipf.warnings;
  std::cout << j.dump(2) << "\n";
  return 0;
}

// --- sweep --------------------------------------------------------------------

// Reduce one run to the clustering feature vector, honoring the config's
// diagnostics block. Machine depth 3 matches the diagnose default.
RunFeatures run_features(const RunResult& r, const DiagSpec& dg, const std::string& run_id,
                         const std::string& label) {
  const std::vector<double> series = dg.observable == "overload_indicator"
                                         ? r.overload_series(true)
                                         : r.aggregate_series(true);
  const SymbolSeries s = dg.observable == "overload_indicator"
                             ? symbolize_indicator(series)
                             : symbolize(series, dg.alphabet);
  RunFeatures f;
  f.run_id = run_id;
  f.mean_aggregate = r.mean_aggregate;
  f.overload_freq = r.overload_freq;
  f.h_mu = entropy_rate(s, dg.effective_l_max()).h_mu;
  f.c_mu = statistical_complexity(reconstruct_epsilon_machine(s, 3, dg.alpha_sig, dg.n_min));
  f.e_pred = predictive_information(s, dg.e_block).e_pred;
  f.regime = regime_name(r.regime);
  f.label = label;
  return f;
}

int cmd_sweep(const CommonOpts& o) {
  DoPins pins;
  std::vector<std::pair<std::string, double>> overrides;
  split_do_specs(o.do_specs, pins, overrides);
  if (!pins.empty())
    throw InvalidArgument("sweep: use dotted --do paths; bare pins conflict with the design");
  const json base = load_patched_json(o, overrides);
  const SimConfig cfg = parse_config(base);

  // A missing sweep block, or one without parameters, degrades to a
  // single-point sweep of the base config.
  std::vector<DesignParameter> space;
  std::vector<Regime> regimes;
  if (cfg.sweep) {
    for (const auto& p : cfg.sweep->parameters) space.push_back({p.path, p.lower, p.upper});
    regimes = cfg.sweep->regimes;
  }
  Matrix design;
  if (space.empty())
    design.push_back({});
  else
    design = cfg.sweep->method == SweepSpec::Method::Grid
                 ? grid_design(space, cfg.sweep->levels)
                 : lhs_design(space, cfg.sweep->n, cfg.master_seed);
  if (regimes.empty()) regimes.push_back(cfg.regime);

  ensure_out_dir(o.out);
  CsvWriter w(fs::path(o.out) / "sweep.csv");
  std::vector<std::string> header = {"point"};
  for (const auto& p : space) header.push_back(p.name);
  header.insert(header.end(), {"regime", "config_hash", "mean_J", "var_J"});
  w.row(header);

  std::vector<RunFeatures> feats;
  for (std::size_t i = 0; i < design.size(); ++i) {
    for (Regime rg : regimes) {
      json patched = base;
      for (std::size_t d = 0; d < space.size(); ++d)
        set_by_path(patched, space[d].name, design[i][d]);
      patched["regime"] = regime_name(rg);
      const SimConfig c = parse_config(patched);
      const ReplicateSummary sum = replicate(c, {}, o.workers);
      std::vector<std::string> row = {std::to_string(i)};
      for (double v : design[i]) row.push_back(fmt_double(v));
      row.insert(row.end(), {regime_name(rg), config_fingerprint(c), fmt_double(sum.mean_j),
                             fmt_double(sum.var_j)});
      w.row(row);
      const std::string tag = "p" + std::to_string(i) + ":" + regime_name(rg);
      for (int rep = 0; rep < c.replications; ++rep)
        feats.push_back(run_features(
            sum.runs[rep], c.diag,
            "p" + std::to_string(i) + "_" + regime_name(rg) + "_r" + std::to_string(rep), tag));
    }
  }
  write_features_csv(fs::path(o.out) / "features.csv", feats, nullptr,
                     "config_hash=" + config_fingerprint(cfg));
  std::cout << "sweep: " << design.size() * regimes.size() << " points, " << feats.size()
            << " runs -> " << (fs::path(o.out) / "features.csv").string() << "\n";
  return 0;
}

// --- diagnose -------------------------------------------------------------------

int cmd_diagnose(const std::string& in, const std::string& out, int alphabet, int l_max,
                 int machine_l, int e_block, int burn_in, const std::string& observable,
                 double alpha_sig, int n_min, double s_drift, double f_cyc) {
  const RunResult run = read_run_csv(in);
  if (static_cast<int>(run.steps.size()) <= burn_in)
    throw SeriesTooShort("diagnose: burn-in consumes the entire series");
  std::vector<double> series;
  for (std::size_t t = burn_in; t < run.steps.size(); ++t)
    series.push_back(observable == "overload_indicator" ? run.steps[t].overload
                                                        : run.steps[t].aggregate);

  const SymbolSeries sym = observable == "overload_indicator"
                               ? symbolize_indicator(series)
                               : symbolize(series, alphabet);
  if (l_max <= 0) l_max = sym.alphabet <= 2 ? 8 : 5;
  const EntropyRateResult h = entropy_rate(sym, l_max);
  const PredictiveInfoResult e = predictive_information(sym, e_block);
  const EpsilonMachine m = reconstruct_epsilon_machine(sym, machine_l, alpha_sig, n_min);
  const TrajectoryClass cls = classify_trajectory(series, s_drift, f_cyc);

  json j = diagnostics_json(h, e, m, cls, sym);
  if (!run.config_hash.empty()) j["config_hash"] = run.config_hash;
  if (!out.empty()) write_json_file(out, j);
  std::cout << j.dump(2) << "\n";
  return 0;
}

// --- cluster --------------------------------------------------------------------

int cmd_cluster(const std::string& in, const std::string& out, int k,
                const std::string& method, int restarts, std::uint64_t seed) {
  const std::vector<RunFeatures> feats = read_features_csv(in);
  const Matrix x = feature_matrix(feats);
  const StandardizeResult sr = standardize(x);

  int chosen_k = k;
  if (chosen_k <= 0) {
    double best = -2.0;
    for (int kk = 2; kk <= 6 && static_cast<std::size_t>(kk) <= sr.data.size(); ++kk) {
      const KMeansResult km = kmeans(sr.data, kk, restarts, split_seed(seed, kk));
      const double s = silhouette_score(sr.data, km.labels, kk);
      if (s > best) {
        best = s;
        chosen_k = kk;
      }
    }
    if (chosen_k <= 0) throw DataError("cluster: too few rows to choose k");
  }

  std::vector<int> labels;
  if (method == "gmm") {
    const GmmResult g = gmm_fit(sr.data, chosen_k, seed);
    labels = g.labels;
  } else if (method == "kmeans") {
    const KMeansResult km = kmeans(sr.data, chosen_k, restarts, seed);
    labels = km.labels;
  } else {
    throw InvalidArgument("cluster: method must be kmeans or gmm");
  }

  ClusterReport rep = cluster_report(feats, labels, chosen_k, sr.data);
  bool have_truth = false;
  for (const auto& f : feats)
    if (!f.label.empty()) have_truth = true;
  if (have_truth) {
    std::map<std::string, int> codes;
    std::vector<int> truth;
    for (const auto& f : feats)
      truth.push_back(codes.emplace(f.label, static_cast<int>(codes.size())).first->second);
    rep.ari_vs_labels = adjusted_rand_index(truth, labels);
  }

  ensure_out_dir(out);
  write_features_csv(fs::path(out) / "clusters.csv", feats, &labels);
  json j;
  j["k"] = chosen_k;
  j["method"] = method;
  j["ari_vs_labels"] = rep.ari_vs_labels;  // NaN serializes as null
  j["silhouette_by_k"] = json::object();
  for (const auto& [kk, s] : rep.silhouette_by_k)
    j["silhouette_by_k"][std::to_string(kk)] = s;
  j["clusters"] = json::array();
  for (const auto& c : rep.clusters) {
    json jc;
    jc["cluster"] = c.cluster;
    jc["size"] = c.size;
    jc["mean_aggregate"] = c.feature_means[0];
    jc["overload_freq"] = c.feature_means[1];
    jc["h_mu"] = c.feature_means[2];
    jc["C_mu"] = c.feature_means[3];
    jc["E_pred"] = c.feature_means[4];
    jc["names"] = c.suggested_names;
    j["clusters"].push_back(jc);
  }
  write_json_file(fs::path(out) / "report.json", j);
  std::cout << j.dump(2) << "\n";
  return 0;
}

// --- morris ----------------------------------------------------------------------

int cmd_morris(const CommonOpts& o) {
  DoPins pins;
  std::vector<std::pair<std::string, double>> overrides;
  split_do_specs(o.do_specs, pins, overrides);
  if (!pins.empty())
    throw InvalidArgument("morris: use dotted --do paths; bare pins conflict with screening");
  const json base = load_patched_json(o, overrides);
  const SimConfig cfg = parse_config(base);
  if (!cfg.morris) throw SchemaError("morris: config has no morris block");
  const MorrisSpec& ms = *cfg.morris;

  std::vector<DesignParameter> space;
  for (const auto& p : ms.parameters) space.push_back({p.path, p.lower, p.upper});

  auto evaluate = [&](const std::vector<double>& point) {
    json patched = base;
    for (std::size_t d = 0; d < space.size(); ++d)
      set_by_path(patched, space[d].name, point[d]);
    const SimConfig c = parse_config(patched);
    return replicate(c, {}, o.workers).mean_j;
  };
  const MorrisResult res = morris_screen(evaluate, space, ms.r, ms.p, cfg.master_seed);

  ensure_out_dir(o.out);
  write_morris_csv(fs::path(o.out) / "morris.csv", res, "config_hash=" + config_fingerprint(cfg));
  json j;
  j["trajectories"] = res.trajectories;
  j["evaluations"] = res.evaluations;
  j["rows"] = json::array();
  for (const auto& row : res.rows) {
    json jr;
    jr["param"] = row.param;
    jr["mu"] = row.mu;
    jr["mu_star"] = row.mu_star;
    jr["sigma"] = row.sigma;
    j["rows"].push_back(jr);
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seedable simulation laboratory for co-adapting policy/agent systems"};
  app.require_subcommand(1);

  CommonOpts sim, swp, mor;
  auto add_common = [](CLI::App* c, CommonOpts& o, bool with_do) {
    c->add_option("--config", o.config_path, "configuration JSON")->required();
    c->add_option("--seed", o.seed, "override sim.seed");
    c->add_option("--out", o.out, "output directory")->required();
    c->add_option("--workers", o.workers, "worker threads (0 = hardware)");
    if (with_do)
      c->add_option("--do", o.do_specs,
                    "name=value[,name=value...]; bare names pin policy coordinates, "
                    "dotted paths patch the config");
  };

  CLI::App* c_sim = app.add_subcommand("simulate", "run replications of one configuration");
  add_common(c_sim, sim, true);

  std::string sy_marg, sy_micro, sy_out, sy_cfg;
  int sy_n = 100, sy_maxit = 1000;
  std::uint64_t sy_seed = 1;
  double sy_tol = 1e-8;
  CLI::App* c_syn = app.add_subcommand("synth", "fit marginals and draw a synthetic roster");
  c_syn->add_option("--marginals", sy_marg, "long-format marginals CSV")->required();
  c_syn->add_option("--microdata", sy_micro, "seed microdata CSV")->required();
  c_syn->add_option("--n", sy_n, "agents to draw");
  c_syn->add_option("--seed", sy_seed, "rng seed");
  c_syn->add_option("--out", sy_out, "output population CSV")->required();
  c_syn->add_option("--config", sy_cfg, "config supplying behavioral priors");
  c_syn->add_option("--tol", sy_tol, "fit tolerance");
  c_syn->add_option("--max-iter", sy_maxit, "fit iteration cap");

  CLI::App* c_swp = app.add_subcommand("sweep", "factorial or latin-hypercube design");
  add_common(c_swp, swp, true);

  std::string dg_in, dg_out, dg_obs = "aggregate";
  int dg_alpha = 2, dg_lmax = 0, dg_ml = 3, dg_eb = 4, dg_burn = 0, dg_nmin = 10;
  double dg_sig = 0.005, dg_sdrift = 2.0, dg_fcyc = 0.4;
  CLI::App* c_dia = app.add_subcommand("diagnose", "complexity diagnostics for one run CSV");
  c_dia->add_option("--in", dg_in, "run CSV")->required();
  c_dia->add_option("--out", dg_out, "write diagnostics JSON here");
  c_dia->add_option("--alphabet", dg_alpha, "symbol count for quantile binning");
  c_dia->add_option("--l-max", dg_lmax, "entropy-curve depth (0 = by alphabet)");
  c_dia->add_option("--machine-l", dg_ml, "history depth for state reconstruction");
  c_dia->add_option("--e-block", dg_eb, "block length for predictive information");
  c_dia->add_option("--burn-in", dg_burn, "steps to drop before analysis");
  c_dia->add_option("--observable", dg_obs, "aggregate | overload_indicator");
  c_dia->add_option("--alpha-sig", dg_sig, "split significance level");
  c_dia->add_option("--n-min", dg_nmin, "minimum history count");
  c_dia->add_option("--s-drift", dg_sdrift, "drift threshold");
  c_dia->add_option("--f-cyc", dg_fcyc, "cyclic spectral fraction threshold");

  std::string cl_in, cl_out, cl_method = "kmeans";
  int cl_k = 0, cl_restarts = 8;
  std::uint64_t cl_seed = 1;
  CLI::App* c_clu = app.add_subcommand("cluster", "group runs by complexity signature");
  c_clu->add_option("--in", cl_in, "features CSV")->required();
  c_clu->add_option("--out", cl_out, "output directory")->required();
  c_clu->add_option("--k", cl_k, "cluster count (0 = silhouette pick)");
  c_clu->add_option("--method", cl_method, "kmeans | gmm");
  c_clu->add_option("--restarts", cl_restarts, "k-means restarts");
  c_clu->add_option("--seed", cl_seed, "rng seed");

  CLI::App* c_mor = app.add_subcommand("morris", "elementary-effects screening");
  add_common(c_mor, mor, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "ERR Usage: " << e.what() << "\n";
    return 2;
  }

  try {
    if (c_sim->parsed()) return cmd_simulate(sim);
    if (c_syn->parsed())
      return cmd_synth(sy_marg, sy_micro, sy_n, sy_seed, sy_out, sy_cfg, sy_tol, sy_maxit);
    if (c_swp->parsed()) return cmd_sweep(swp);
    if (c_dia->parsed())
      return cmd_diagnose(dg_in, dg_out, dg_alpha, dg_lmax, dg_ml, dg_eb, dg_burn, dg_obs,
                          dg_sig, dg_nmin, dg_sdrift, dg_fcyc);
    if (c_clu->parsed())
      return cmd_cluster(cl_in, cl_out, cl_k, cl_method, cl_restarts, cl_seed);
    if (c_mor->parsed()) return cmd_morris(mor);
    std::cerr << "ERR Usage: no subcommand\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "ERR " << e.name() << ": " << e.what() << "\n";
    return is_usage_error(e.name()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "ERR Internal: " << e.what() << "\n";
    return 3;
  }
}
