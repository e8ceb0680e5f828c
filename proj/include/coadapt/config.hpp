#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coadapt/control.hpp"
#include "coadapt/error.hpp"
#include "coadapt/population.hpp"

namespace coadapt {

using json = nlohmann::json;

enum class ScenarioKind { Emissions, Grid };

inline ScenarioKind parse_scenario_kind(const std::string& s) {
  if (s == "emissions") return ScenarioKind::Emissions;
  if (s == "grid") return ScenarioKind::Grid;
  throw SchemaError("scenario: expected 'emissions' or 'grid', got '" + s + "'");
}

inline const char* scenario_kind_name(ScenarioKind k) {
  return k == ScenarioKind::Emissions ? "emissions" : "grid";
}

struct ShockSpec {
  enum class Kind { None, Gaussian, Sinusoid, Mixed };
  Kind kind = Kind::None;
  double sigma = 0.0;      // gaussian multiplicative
  double amplitude = 0.0;  // sinusoid
  int period = 24;
};

struct EnvSpec {
  int nodes = 1;
  double capacity = 0.0;                                 // uniform per-node capacity
  std::vector<std::pair<int, double>> capacity_schedule;  // piecewise-constant, single node
  std::string topology_csv;
  std::string edges_csv;
  std::string assignment = "random";  // "random" | "population" (node column)
};

struct SweepParam {
  std::string path;
  double lower = 0.0;
  double upper = 1.0;
};

struct SweepSpec {
  enum class Method { Grid, Lhs };
  Method method = Method::Grid;
  int levels = 3;
  int n = 8;
  std::vector<SweepParam> parameters;
  std::vector<Regime> regimes;  // empty -> config regime only
};

struct MorrisSpec {
  int r = 8;
  int p = 4;
  std::vector<SweepParam> parameters;
};

struct DiagSpec {
  int alphabet = 2;
  int l_max = 0;  // 0 -> default by alphabet (8 for binary, 5 for quaternary)
  double alpha_sig = 0.005;
  int n_min = 10;
  std::string observable = "aggregate";  // or "overload_indicator"
  double s_drift = 2.0;
  double f_cyc = 0.4;
  int e_block = 4;  // L for predictive information

  int effective_l_max() const {
    if (l_max > 0) return l_max;
    return alphabet <= 2 ? 8 : 5;
  }
};

struct SimConfig {
  ScenarioKind scenario = ScenarioKind::Emissions;
  Regime regime = Regime::CPCA;

  int n_agents = 100;
  AttributePrior theta_prior;
  AttributePrior eta_prior;
  double x_max = 1e6;
  std::string population_csv;

  double rho = 0.0;
  double beta_b = 1.0;
  int lookahead = 0;
  int belief_history = 8;

  PolicyVector policy;

  double alpha = 1.0, beta = 0.0, gamma = 0.0;  // objective weights
  double kappa = 0.0;
  double tau_fallback = 1.0;

  EnvSpec env;
  ShockSpec shock;

  int horizon = 1000;
  int window = 0;    // 0 -> horizon / 4
  int burn_in = -1;  // -1 -> horizon / 4
  int epoch = 50;
  double eps_tol = 1e-6;
  int vol_window = 20;
  int replications = 1;
  std::uint64_t master_seed = 1;
  bool record_node_loads = false;

  DiagSpec diag;
  int workers = 0;
  double dummy = 0.0;  // deliberately inert; anchors sensitivity screens

  std::optional<SweepSpec> sweep;
  std::optional<MorrisSpec> morris;

  int effective_window() const { return window > 0 ? window : std::max(1, horizon / 4); }
  int effective_burn_in() const { return burn_in >= 0 ? burn_in : horizon / 4; }
};

namespace detail {

class SchemaReader {
 public:
  SchemaReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(path_ + ": expected object");
  }
  ~SchemaReader() = default;

  template <typename T>
  T get(const std::string& key, const T& fallback) {
    mark(key);
    if (!j_.contains(key)) return fallback;
    return convert<T>(j_.at(key), path_ + key);
  }
  template <typename T>
  T require(const std::string& key) {
    mark(key);
    if (!j_.contains(key)) throw SchemaError(path_ + key + ": required field missing");
    return convert<T>(j_.at(key), path_ + key);
  }
  bool has(const std::string& key) {
    return j_.contains(key);
  }
  const json& raw(const std::string& key) {
    mark(key);
    return j_.at(key);
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
        throw SchemaError(path_ + it.key() + ": unknown field");
  }

 private:
  void mark(const std::string& key) {
    if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) seen_.push_back(key);
  }
  template <typename T>
  static T convert(const json& v, const std::string& at) {
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw SchemaError(at + ": wrong type");
    }
  }
  const json& j_;
  std::string path_;
  std::vector<std::string> seen_;
};

inline AttributePrior parse_prior(const json& j, const std::string& name,
                                  const std::string& path) {
  SchemaReader r(j, path);
  AttributePrior p;
  p.name = name;
  const std::string dist = r.require<std::string>("dist");
  if (dist == "point") {
    p.kind = AttributePrior::Kind::Point;
    p.value = r.require<double>("value");
  } else if (dist == "uniform") {
    p.kind = AttributePrior::Kind::Uniform;
    p.a = r.require<double>("a");
    p.b = r.require<double>("b");
  } else if (dist == "truncnormal") {
    p.kind = AttributePrior::Kind::TruncNormal;
    p.mu = r.require<double>("mu");
    p.sigma = r.require<double>("sigma");
    p.a = r.require<double>("a");
    p.b = r.require<double>("b");
  } else if (dist == "categorical") {
    p.kind = AttributePrior::Kind::Categorical;
    p.probs = r.require<std::vector<double>>("probs");
    p.values = r.require<std::vector<double>>("values");
  } else {
    throw SchemaError(path + "dist: unknown distribution '" + dist + "'");
  }
  r.finish();
  return p;
}

inline json prior_to_json(const AttributePrior& p) {
  json j;
  switch (p.kind) {
    case AttributePrior::Kind::Point:
      j["dist"] = "point";
      j["value"] = p.value;
      break;
    case AttributePrior::Kind::Uniform:
      j["dist"] = "uniform";
      j["a"] = p.a;
      j["b"] = p.b;
      break;
    case AttributePrior::Kind::TruncNormal:
      j["dist"] = "truncnormal";
      j["mu"] = p.mu;
      j["sigma"] = p.sigma;
      j["a"] = p.a;
      j["b"] = p.b;
      break;
    case AttributePrior::Kind::Categorical:
      j["dist"] = "categorical";
      j["probs"] = p.probs;
      j["values"] = p.values;
      break;
  }
  return j;
}

inline std::vector<SweepParam> parse_sweep_params(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path + ": expected array");
  std::vector<SweepParam> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    SchemaReader r(j[i], path + "[" + std::to_string(i) + "].");
    SweepParam p;
    p.path = r.require<std::string>("path");
    p.lower = r.require<double>("lower");
    p.upper = r.require<double>("upper");
    r.finish();
    if (!(p.upper > p.lower)) throw SchemaError(path + ": upper must exceed lower");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace detail

// Installed when a config omits the policy block entirely.  The emissions
// study prices the action (lambda) and rebates part of it (sigma); the grid
// study prices the action (lambda) and moves the congestion threshold (tau).
inline void install_default_policy(SimConfig& c) {
  if (!c.policy.coords.empty()) return;
  c.policy.coords.push_back({.name = "lambda", .value = 0.5, .lower = 0.0, .upper = 5.0,
                             .step = 0.05, .search = true});
  if (c.scenario == ScenarioKind::Emissions)
    c.policy.coords.push_back({.name = "sigma", .value = 0.0, .lower = 0.0, .upper = 2.0,
                               .step = 0.05, .search = true});
  else
    c.policy.coords.push_back({.name = "tau", .value = 1.0, .lower = 0.5, .upper = 1.5,
                               .step = 0.05, .search = true});
}

inline SimConfig parse_config(const json& root) {
  detail::SchemaReader r(root, "");
  SimConfig c;
  c.scenario = parse_scenario_kind(r.get<std::string>("scenario", "emissions"));
  c.regime = parse_regime(r.get<std::string>("regime", "CPCA"));

  c.theta_prior = point_prior("theta", 1.0);
  c.eta_prior = point_prior("eta", 0.0);
  if (r.has("agents")) {
    detail::SchemaReader a(r.raw("agents"), "agents.");
    c.n_agents = a.get<int>("n", c.n_agents);
    if (a.has("theta")) c.theta_prior = detail::parse_prior(a.raw("theta"), "theta", "agents.theta.");
    if (a.has("eta")) c.eta_prior = detail::parse_prior(a.raw("eta"), "eta", "agents.eta.");
    c.x_max = a.get<double>("x_max", c.x_max);
    c.population_csv = a.get<std::string>("population_csv", "");
    a.finish();
  }
  if (c.n_agents < 1) throw SchemaError("agents.n: must be >= 1");

  if (r.has("behavior")) {
    detail::SchemaReader b(r.raw("behavior"), "behavior.");
    c.rho = b.get<double>("rho", 0.0);
    c.beta_b = b.get<double>("beta_b", 1.0);
    c.lookahead = b.get<int>("lookahead", 0);
    c.belief_history = b.get<int>("history", 8);
    b.finish();
  }
  if (!(c.rho >= 0.0 && c.rho <= 1.0)) throw SchemaError("behavior.rho: outside [0,1]");
  if (!(c.beta_b > 0.0 && c.beta_b <= 1.0)) throw SchemaError("behavior.beta_b: outside (0,1]");
  if (c.lookahead < 0) throw SchemaError("behavior.lookahead: must be >= 0");
  if (c.belief_history < 4) throw SchemaError("behavior.history: must be >= 4");

  if (r.has("policy")) {
    const json& jp = r.raw("policy");
    if (!jp.is_array()) throw SchemaError("policy: expected array");
    for (std::size_t i = 0; i < jp.size(); ++i) {
      detail::SchemaReader pr(jp[i], "policy[" + std::to_string(i) + "].");
      PolicyCoordinate pc;
      pc.name = pr.require<std::string>("name");
      pc.value = pr.require<double>("value");
      pc.lower = pr.require<double>("lower");
      pc.upper = pr.require<double>("upper");
      pc.step = pr.require<double>("step");
      pc.search = pr.get<bool>("search", true);
      pr.finish();
      c.policy.coords.push_back(std::move(pc));
    }
  }

  if (r.has("weights")) {
    detail::SchemaReader w(r.raw("weights"), "weights.");
    c.alpha = w.get<double>("alpha", 1.0);
    c.beta = w.get<double>("beta", 0.0);
    c.gamma = w.get<double>("gamma", 0.0);
    w.finish();
  }
  if (r.has("congestion")) {
    detail::SchemaReader g(r.raw("congestion"), "congestion.");
    c.kappa = g.get<double>("kappa", 0.0);
    c.tau_fallback = g.get<double>("tau", 1.0);
    g.finish();
  }
  if (c.kappa < 0.0) throw SchemaError("congestion.kappa: must be >= 0");

  if (r.has("environment")) {
    detail::SchemaReader e(r.raw("environment"), "environment.");
    c.env.nodes = e.get<int>("nodes", 1);
    c.env.capacity = e.get<double>("capacity", 0.0);
    c.env.topology_csv = e.get<std::string>("topology_csv", "");
    c.env.edges_csv = e.get<std::string>("edges_csv", "");
    c.env.assignment = e.get<std::string>("assignment", "random");
    if (e.has("capacity_schedule")) {
      const json& js = e.raw("capacity_schedule");
      if (!js.is_array()) throw SchemaError("environment.capacity_schedule: expected array");
      for (const auto& item : js) {
        if (!item.is_array() || item.size() != 2)
          throw SchemaError("environment.capacity_schedule: expected [t, value] pairs");
        c.env.capacity_schedule.emplace_back(item[0].get<int>(), item[1].get<double>());
      }
    }
    e.finish();
  }
  if (c.env.nodes < 1) throw SchemaError("environment.nodes: must be >= 1");
  if (c.env.assignment != "random" && c.env.assignment != "population")
    throw SchemaError("environment.assignment: expected 'random' or 'population'");
  for (std::size_t i = 1; i < c.env.capacity_schedule.size(); ++i)
    if (c.env.capacity_schedule[i].first <= c.env.capacity_schedule[i - 1].first)
      throw SchemaError("environment.capacity_schedule: breakpoints must increase");

  if (r.has("shock")) {
    detail::SchemaReader s(r.raw("shock"), "shock.");
    const std::string kind = s.get<std::string>("type", "none");
    if (kind == "none") c.shock.kind = ShockSpec::Kind::None;
    else if (kind == "gaussian") c.shock.kind = ShockSpec::Kind::Gaussian;
    else if (kind == "sinusoid") c.shock.kind = ShockSpec::Kind::Sinusoid;
    else if (kind == "mixed") c.shock.kind = ShockSpec::Kind::Mixed;
    else throw SchemaError("shock.type: unknown '" + kind + "'");
    c.shock.sigma = s.get<double>("sigma", 0.0);
    c.shock.amplitude = s.get<double>("amplitude", 0.0);
    c.shock.period = s.get<int>("period", 24);
    s.finish();
  }
  if (c.shock.sigma < 0.0) throw SchemaError("shock.sigma: must be >= 0");
  if (c.shock.period < 1) throw SchemaError("shock.period: must be >= 1");

  if (r.has("sim")) {
    detail::SchemaReader s(r.raw("sim"), "sim.");
    c.horizon = s.get<int>("horizon", 1000);
    c.window = s.get<int>("window", 0);
    c.burn_in = s.get<int>("burn_in", -1);
    c.epoch = s.get<int>("epoch", 50);
    if (s.has("eps_tol")) {
      const json& et = s.raw("eps_tol");
      if (et.is_string()) {
        if (et.get<std::string>() != "inf")
          throw SchemaError("sim.eps_tol: expected number or 'inf'");
        c.eps_tol = std::numeric_limits<double>::infinity();
      } else {
        c.eps_tol = et.get<double>();
      }
    }
    c.vol_window = s.get<int>("volatility_window", 20);
    c.replications = s.get<int>("replications", 1);
    c.master_seed = s.get<std::uint64_t>("seed", 1);
    c.record_node_loads = s.get<bool>("record_node_loads", false);
    s.finish();
  }
  if (c.horizon < 1) throw SchemaError("sim.horizon: must be >= 1");
  if (c.effective_window() > c.horizon) throw SchemaError("sim.window: exceeds horizon");
  if (c.effective_burn_in() >= c.horizon) throw SchemaError("sim.burn_in: must be < horizon");
  if (c.epoch < 1) throw SchemaError("sim.epoch: must be >= 1");
  if (c.vol_window < 2) throw SchemaError("sim.volatility_window: must be >= 2");
  if (c.replications < 1) throw SchemaError("sim.replications: must be >= 1");
  if (std::isfinite(c.eps_tol) && c.eps_tol < 0.0)
    throw SchemaError("sim.eps_tol: must be >= 0 or 'inf'");

  if (r.has("diagnostics")) {
    detail::SchemaReader d(r.raw("diagnostics"), "diagnostics.");
    c.diag.alphabet = d.get<int>("alphabet", 2);
    c.diag.l_max = d.get<int>("l_max", 0);
    c.diag.alpha_sig = d.get<double>("alpha_sig", 0.005);
    c.diag.n_min = d.get<int>("n_min", 10);
    c.diag.observable = d.get<std::string>("observable", "aggregate");
    c.diag.s_drift = d.get<double>("s_drift", 2.0);
    c.diag.f_cyc = d.get<double>("f_cyc", 0.4);
    c.diag.e_block = d.get<int>("e_block", 4);
    d.finish();
  }
  if (c.diag.alphabet < 2) throw SchemaError("diagnostics.alphabet: must be >= 2");
  if (c.diag.observable != "aggregate" && c.diag.observable != "overload_indicator")
    throw SchemaError("diagnostics.observable: expected 'aggregate' or 'overload_indicator'");
  if (!(c.diag.alpha_sig > 0.0 && c.diag.alpha_sig < 1.0))
    throw SchemaError("diagnostics.alpha_sig: outside (0,1)");
  if (c.diag.n_min < 1) throw SchemaError("diagnostics.n_min: must be >= 1");
  if (c.diag.e_block < 1) throw SchemaError("diagnostics.e_block: must be >= 1");

  c.workers = r.get<int>("workers", 0);
  c.dummy = r.get<double>("dummy", 0.0);

  if (r.has("sweep")) {
    detail::SchemaReader s(r.raw("sweep"), "sweep.");
    SweepSpec sw;
    const std::string method = s.get<std::string>("method", "grid");
    if (method == "grid") sw.method = SweepSpec::Method::Grid;
    else if (method == "lhs") sw.method = SweepSpec::Method::Lhs;
    else throw SchemaError("sweep.method: expected 'grid' or 'lhs'");
    sw.levels = s.get<int>("levels", 3);
    sw.n = s.get<int>("n", 8);
    if (s.has("parameters"))
      sw.parameters = detail::parse_sweep_params(s.raw("parameters"), "sweep.parameters");
    if (s.has("regimes")) {
      for (const auto& rg : s.raw("regimes")) sw.regimes.push_back(parse_regime(rg.get<std::string>()));
    }
    s.finish();
    if (sw.levels < 1) throw SchemaError("sweep.levels: must be >= 1");
    if (sw.n < 1) throw SchemaError("sweep.n: must be >= 1");
    c.sweep = std::move(sw);
  }

  if (r.has("morris")) {
    detail::SchemaReader s(r.raw("morris"), "morris.");
    MorrisSpec ms;
    ms.r = s.get<int>("r", 8);
    ms.p = s.get<int>("p", 4);
    ms.parameters = detail::parse_sweep_params(s.raw("parameters"), "morris.parameters");
    s.finish();
    if (ms.parameters.empty()) throw SchemaError("morris.parameters: empty");
    c.morris = std::move(ms);
  }

  r.finish();
  install_default_policy(c);
  validate_policy(c.policy);
  validate_prior(c.theta_prior, true);
  validate_prior(c.eta_prior, true);
  return c;
}

// Fully resolved canonical form: defaults filled in, keys emitted in sorted
// order.  Fingerprints hash this text, so two spellings of the same effective
// configuration collide, and any material override changes the hash.
inline json canonical_config(const SimConfig& c) {
  json j;
  j["scenario"] = scenario_kind_name(c.scenario);
  j["regime"] = regime_name(c.regime);
  j["agents"]["n"] = c.n_agents;
  j["agents"]["theta"] = detail::prior_to_json(c.theta_prior);
  j["agents"]["eta"] = detail::prior_to_json(c.eta_prior);
  j["agents"]["x_max"] = c.x_max;
  j["agents"]["population_csv"] = c.population_csv;
  j["behavior"]["rho"] = c.rho;
  j["behavior"]["beta_b"] = c.beta_b;
  j["behavior"]["lookahead"] = c.lookahead;
  j["behavior"]["history"] = c.belief_history;
  j["policy"] = json::array();
  for (const auto& pc : c.policy.coords) {
    json jc;
    jc["name"] = pc.name;
    jc["value"] = pc.value;
    jc["lower"] = pc.lower;
    jc["upper"] = pc.upper;
    jc["step"] = pc.step;
    jc["search"] = pc.search;
    j["policy"].push_back(jc);
  }
  j["weights"]["alpha"] = c.alpha;
  j["weights"]["beta"] = c.beta;
  j["weights"]["gamma"] = c.gamma;
  j["congestion"]["kappa"] = c.kappa;
  j["congestion"]["tau"] = c.tau_fallback;
  j["environment"]["nodes"] = c.env.nodes;
  j["environment"]["capacity"] = c.env.capacity;
  j["environment"]["capacity_schedule"] = json::array();
  for (const auto& [t, v] : c.env.capacity_schedule)
    j["environment"]["capacity_schedule"].push_back(json::array({t, v}));
  j["environment"]["topology_csv"] = c.env.topology_csv;
  j["environment"]["edges_csv"] = c.env.edges_csv;
  j["environment"]["assignment"] = c.env.assignment;
  switch (c.shock.kind) {
    case ShockSpec::Kind::None: j["shock"]["type"] = "none"; break;
    case ShockSpec::Kind::Gaussian: j["shock"]["type"] = "gaussian"; break;
    case ShockSpec::Kind::Sinusoid: j["shock"]["type"] = "sinusoid"; break;
    case ShockSpec::Kind::Mixed: j["shock"]["type"] = "mixed"; break;
  }
  j["shock"]["sigma"] = c.shock.sigma;
  j["shock"]["amplitude"] = c.shock.amplitude;
  j["shock"]["period"] = c.shock.period;
  j["sim"]["horizon"] = c.horizon;
  j["sim"]["window"] = c.effective_window();
  j["sim"]["burn_in"] = c.effective_burn_in();
  j["sim"]["epoch"] = c.epoch;
  if (std::isfinite(c.eps_tol)) j["sim"]["eps_tol"] = c.eps_tol;
  else j["sim"]["eps_tol"] = "inf";
  j["sim"]["volatility_window"] = c.vol_window;
  j["sim"]["replications"] = c.replications;
  j["sim"]["seed"] = c.master_seed;
  j["sim"]["record_node_loads"] = c.record_node_loads;
  j["diagnostics"]["alphabet"] = c.diag.alphabet;
  j["diagnostics"]["l_max"] = c.diag.effective_l_max();
  j["diagnostics"]["alpha_sig"] = c.diag.alpha_sig;
  j["diagnostics"]["n_min"] = c.diag.n_min;
  j["diagnostics"]["observable"] = c.diag.observable;
  j["diagnostics"]["s_drift"] = c.diag.s_drift;
  j["diagnostics"]["f_cyc"] = c.diag.f_cyc;
  j["diagnostics"]["e_block"] = c.diag.e_block;
  j["workers"] = c.workers;
  j["dummy"] = c.dummy;
  if (c.sweep) {
    const auto& sw = *c.sweep;
    j["sweep"]["method"] = sw.method == SweepSpec::Method::Grid ? "grid" : "lhs";
    j["sweep"]["levels"] = sw.levels;
    j["sweep"]["n"] = sw.n;
    j["sweep"]["parameters"] = json::array();
    for (const auto& p : sw.parameters) {
      json jp;
      jp["path"] = p.path;
      jp["lower"] = p.lower;
      jp["upper"] = p.upper;
      j["sweep"]["parameters"].push_back(jp);
    }
    j["sweep"]["regimes"] = json::array();
    for (Regime rg : sw.regimes) j["sweep"]["regimes"].push_back(regime_name(rg));
  }
  if (c.morris) {
    j["morris"]["r"] = c.morris->r;
    j["morris"]["p"] = c.morris->p;
    j["morris"]["parameters"] = json::array();
    for (const auto& p : c.morris->parameters) {
      json jp;
      jp["path"] = p.path;
      jp["lower"] = p.lower;
      jp["upper"] = p.upper;
      j["morris"]["parameters"].push_back(jp);
    }
  }
  return j;
}

// FNV-1a over the canonical dump, as 16 lowercase hex digits.
inline std::string config_fingerprint(const SimConfig& c) {
  const std::string text = canonical_config(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 16);
}

inline json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

inline SimConfig load_config(const std::filesystem::path& path) {
  return parse_config(load_json_file(path));
}

// Sets a value addressed by a dotted path on the raw JSON; array-of-objects
// segments are matched by their "name" field, so "policy.lambda.value"
// addresses the lambda coordinate.  Used by sweeps, screening, and overrides.
inline void set_by_path(json& root, const std::string& path, double value) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : path) {
    if (ch == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  json* node = &root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    const std::string& key = parts[i];
    if (node->is_array()) {
      json* hit = nullptr;
      for (auto& item : *node)
        if (item.is_object() && item.contains("name") && item.at("name") == key) {
          hit = &item;
          break;
        }
      if (!hit) throw SchemaError("path '" + path + "': no element named '" + key + "'");
      node = hit;
    } else if (node->is_object()) {
      if (!node->contains(key)) (*node)[key] = json::object();
      node = &(*node)[key];
    } else {
      throw SchemaError("path '" + path + "': cannot descend into scalar at '" + key + "'");
    }
  }
  const std::string& leaf = parts.back();
  if (node->is_array()) throw SchemaError("path '" + path + "': ends inside array");
  if (!node->is_object())
    throw SchemaError("path '" + path + "': cannot descend into scalar at '" + leaf + "'");
  (*node)[leaf] = value;
}

}  // namespace coadapt
