#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coadapt/config.hpp"
#include "coadapt/control.hpp"
#include "coadapt/environment.hpp"
#include "coadapt/parallel.hpp"
#include "coadapt/scenarios.hpp"
#include "coadapt/stats.hpp"

namespace coadapt {

struct StepRecord {
  double aggregate = 0.0;
  double overload = 0.0;
  double volatility = 0.0;
  double phi = 0.0;
  std::vector<double> policy;      // coordinate values in force at this step
  std::vector<double> node_loads;  // filled only when record_node_loads
};

struct RunResult {
  std::vector<StepRecord> steps;
  std::vector<std::string> policy_names;
  double j = 0.0;
  double mean_aggregate = 0.0;
  double overload_freq = 0.0;
  std::uint64_t master_seed = 0;
  int rep = 0;
  std::string config_hash;
  Regime regime = Regime::CPCA;
  int burn_in = 0;
  int window = 0;

  std::vector<double> aggregate_series(bool post_burn_in = true) const {
    std::vector<double> v;
    const std::size_t start = post_burn_in ? static_cast<std::size_t>(burn_in) : 0;
    for (std::size_t t = start; t < steps.size(); ++t) v.push_back(steps[t].aggregate);
    return v;
  }
  std::vector<double> overload_series(bool post_burn_in = true) const {
    std::vector<double> v;
    const std::size_t start = post_burn_in ? static_cast<std::size_t>(burn_in) : 0;
    for (std::size_t t = start; t < steps.size(); ++t) v.push_back(steps[t].overload);
    return v;
  }
};

// Sample sd over the trailing window of the series, current value included.
// Fewer than two points reads as perfectly calm.
inline double rolling_volatility(const std::vector<double>& series, int window) {
  if (window < 2) throw InvalidArgument("rolling_volatility: window must be >= 2");
  const std::size_t n = series.size();
  if (n < 2) return 0.0;
  const std::size_t w = std::min<std::size_t>(window, n);
  return sample_sd(std::span<const double>(series.data() + (n - w), w));
}

// J = mean per-step objective over the final evaluation window.
inline double evaluate_J(const std::vector<double>& phi, int window) {
  if (window < 1) throw InvalidArgument("evaluate_J: window must be >= 1");
  if (static_cast<std::size_t>(window) > phi.size())
    throw WindowTooLong("evaluate_J: window " + std::to_string(window) + " exceeds series of " +
                        std::to_string(phi.size()));
  return mean(std::span<const double>(phi.data() + (phi.size() - window), window));
}

using DoPins = std::vector<std::pair<std::string, double>>;

// One replication.  Step t: exogenous scale, belief update and action choice,
// loads and pressure signals, objective, policy probe at epoch boundaries,
// record, then the end-of-step adaptive response to what agents just saw.
inline RunResult run_single(const SimConfig& cfg, int rep, const DoPins& do_pins = {}) {
  SimConfig c = cfg;
  ScmGraph scm = default_scm(c);
  bool intervened = false;
  if (!do_pins.empty()) {
    PolicyVector pinned = c.policy;
    for (const auto& [name, v] : do_pins) {
      const int i = pinned.index_of(name);
      if (i < 0) throw UnknownVariable("do(" + name + "): no such policy coordinate");
      pinned.coords[i].value = v;
    }
    scm = apply_intervention(std::move(scm), pinned);
    c.policy = pinned;
    intervened = true;
  }

  World w = build_world(c, c.master_seed, rep);
  const PolicyRoles roles = map_policy_roles(c.policy);
  Rng shock_rng(split_seed(c.master_seed, static_cast<std::uint64_t>(rep), kStreamShocks));

  PolicyVector pol = c.policy;
  SearchState st;
  const bool adapt = agents_adapt(c.regime);
  const bool searching = policy_varies(c.regime) && !intervened;
  const std::size_t n = w.agents.size();

  RunResult r;
  r.master_seed = c.master_seed;
  r.rep = rep;
  r.config_hash = config_fingerprint(c);
  r.regime = c.regime;
  r.burn_in = c.effective_burn_in();
  r.window = c.effective_window();
  for (const auto& pc : pol.coords) r.policy_names.push_back(pc.name);
  r.steps.reserve(c.horizon);

  std::vector<double> agg_hist, phi_hist;
  agg_hist.reserve(c.horizon);
  phi_hist.reserve(c.horizon);
  std::vector<double> actions(n), eff_price(n, 0.0);

  for (int t = 0; t < c.horizon; ++t) {
    const double scale = shock_scale(c.shock, t, shock_rng);
    const std::vector<double> pvals = pol.values();

    if (adapt) {
      for (std::size_t i = 0; i < n; ++i) {
        AgentState& a = w.agents[i];
        belief_update(a.belief, pvals, c.beta_b);
        const double pa = roles.price >= 0
                              ? anticipated_price(a.belief, roles.price, c.lookahead)
                              : 0.0;
        const double ps = roles.subsidy >= 0
                              ? anticipated_price(a.belief, roles.subsidy, c.lookahead)
                              : 0.0;
        eff_price[i] = std::max(0.0, pa - ps);
        actions[i] = a.x;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i)
        actions[i] = std::clamp(scale * w.agents[i].theta, 0.0, c.x_max);
    }

    const LoadState loads = compute_loads(w.topo, actions);
    if (!std::isfinite(loads.aggregate))
      throw NumericOverflow("aggregate diverged at t=" + std::to_string(t));
    const std::vector<double> caps = capacities_at(w, c.env, t);
    const double tau = roles.tau >= 0 ? pvals[roles.tau] : c.tau_fallback;
    const std::vector<double> cong = congestion_signal(loads, caps, tau, c.kappa);
    const double over = overload_metric(loads, caps);

    agg_hist.push_back(loads.aggregate);
    const double vol = rolling_volatility(agg_hist, c.vol_window);
    const double phi = -c.alpha * loads.aggregate - c.beta * over - c.gamma * vol;
    if (!std::isfinite(phi)) throw NumericOverflow("objective diverged at t=" + std::to_string(t));
    phi_hist.push_back(phi);

    if (searching && (t + 1) % c.epoch == 0) {
      const double trailing_j =
          mean(std::span<const double>(phi_hist.data() + (phi_hist.size() - c.epoch), c.epoch));
      online_policy_step(pol, st, trailing_j, c.eps_tol);
    }

    StepRecord rec;
    rec.aggregate = loads.aggregate;
    rec.overload = over;
    rec.volatility = vol;
    rec.phi = phi;
    rec.policy = pvals;
    if (c.record_node_loads) rec.node_loads = loads.node_load;
    r.steps.push_back(std::move(rec));

    if (adapt) {
      for (std::size_t i = 0; i < n; ++i) {
        AgentState& a = w.agents[i];
        a.x = adaptive_update(a, eff_price[i], cong[a.node], c.rho, c.x_max, scale * a.theta);
      }
    }
  }

  r.j = evaluate_J(phi_hist, r.window);
  double sum_agg = 0.0;
  int over_cnt = 0, cnt = 0;
  for (int t = r.burn_in; t < c.horizon; ++t) {
    sum_agg += r.steps[t].aggregate;
    if (r.steps[t].overload > 0.0) ++over_cnt;
    ++cnt;
  }
  r.mean_aggregate = sum_agg / cnt;
  r.overload_freq = static_cast<double>(over_cnt) / cnt;
  return r;
}

struct ReplicateSummary {
  std::vector<RunResult> runs;
  double mean_j = 0.0;
  double var_j = 0.0;  // unbiased across replications
};

inline ReplicateSummary replicate(const SimConfig& c, const DoPins& do_pins = {},
                                  int workers_override = -1) {
  const unsigned workers =
      resolve_workers(workers_override >= 0 ? workers_override : c.workers);
  ReplicateSummary s;
  s.runs.resize(c.replications);
  parallel_for(static_cast<std::size_t>(c.replications), workers,
               [&](std::size_t i) { s.runs[i] = run_single(c, static_cast<int>(i), do_pins); });
  std::vector<double> js(s.runs.size());
  for (std::size_t i = 0; i < js.size(); ++i) js[i] = s.runs[i].j;
  s.mean_j = mean(js);
  s.var_j = sample_variance(js);
  return s;
}

}  // namespace coadapt
