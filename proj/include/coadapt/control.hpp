#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coadapt/csv.hpp"
#include "coadapt/error.hpp"

namespace coadapt {

// --- policy ------------------------------------------------------------------

struct PolicyCoordinate {
  std::string name;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double step = 0.0;
  bool search = true;  // false freezes the coordinate for G and offline search
};

struct PolicyVector {
  std::vector<PolicyCoordinate> coords;

  std::size_t size() const { return coords.size(); }
  int index_of(const std::string& name) const {
    for (std::size_t i = 0; i < coords.size(); ++i)
      if (coords[i].name == name) return static_cast<int>(i);
    return -1;
  }
  std::vector<double> values() const {
    std::vector<double> v(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) v[i] = coords[i].value;
    return v;
  }
};

inline void validate_policy(const PolicyVector& p) {
  std::map<std::string, bool> seen;
  for (const auto& c : p.coords) {
    if (c.name.empty()) throw InvalidArgument("policy: unnamed coordinate");
    if (!seen.emplace(c.name, true).second)
      throw InvalidArgument("policy: duplicate coordinate '" + c.name + "'");
    if (!(c.lower <= c.upper))
      throw InvalidArgument("policy '" + c.name + "': lower > upper");
    if (!(c.value >= c.lower && c.value <= c.upper))
      throw OutOfBounds("policy '" + c.name + "': value " + fmt_double(c.value) +
                        " outside [" + fmt_double(c.lower) + "," + fmt_double(c.upper) + "]");
    if (!(c.step > 0.0)) throw InvalidArgument("policy '" + c.name + "': step must be > 0");
  }
}

// --- regimes -----------------------------------------------------------------

enum class Regime { CPCA, CPVA, VPCA, VPVA };

inline Regime parse_regime(const std::string& s) {
  if (s == "CPCA") return Regime::CPCA;
  if (s == "CPVA") return Regime::CPVA;
  if (s == "VPCA") return Regime::VPCA;
  if (s == "VPVA") return Regime::VPVA;
  throw SchemaError("unknown regime '" + s + "'");
}

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::CPCA: return "CPCA";
    case Regime::CPVA: return "CPVA";
    case Regime::VPCA: return "VPCA";
    case Regime::VPVA: return "VPVA";
  }
  return "?";
}

// First letter: does the policy update rule run?  Second: do agents adapt?
inline bool policy_varies(Regime r) { return r == Regime::VPCA || r == Regime::VPVA; }
inline bool agents_adapt(Regime r) { return r == Regime::CPVA || r == Regime::VPVA; }

// --- online policy search (G) --------------------------------------------------

// One-coordinate-at-a-time probing with accept/revert at epoch boundaries.
// Between boundaries the policy is exactly the incumbent plus at most one
// pending perturbation.
struct SearchState {
  int epoch = 0;
  bool has_baseline = false;
  double last_accepted_j = 0.0;
  std::size_t coord = 0;
  int sign = +1;
  bool pending = false;
  std::size_t pending_coord = 0;
  double pre_value = 0.0;
  double decay = 1.0;  // reserved for offline refinement; online probing keeps fixed steps
};

namespace detail {
inline bool any_searchable(const PolicyVector& p) {
  for (const auto& c : p.coords)
    if (c.search) return true;
  return false;
}
}  // namespace detail

// Called at an epoch boundary with the trailing performance estimate for the
// epoch that just ended.  A non-finite eps_tol disables the searcher entirely
// (no probing), which makes such a run coincide with its constant-policy twin.
inline void online_policy_step(PolicyVector& p, SearchState& st, double trailing_j,
                               double eps_tol) {
  if (!std::isfinite(eps_tol)) return;
  if (eps_tol < 0.0) throw InvalidArgument("online_policy_step: eps_tol must be >= 0");
  if (!detail::any_searchable(p)) return;

  if (st.pending) {
    if (trailing_j - st.last_accepted_j > eps_tol) {
      st.last_accepted_j = trailing_j;  // keep the perturbation
    } else {
      p.coords[st.pending_coord].value = st.pre_value;  // revert
    }
    st.pending = false;
  } else if (!st.has_baseline) {
    st.last_accepted_j = trailing_j;
    st.has_baseline = true;
  }

  while (!p.coords[st.coord % p.size()].search) st.coord = (st.coord + 1) % p.size();
  st.coord %= p.size();
  auto& c = p.coords[st.coord];
  st.pre_value = c.value;
  st.pending_coord = st.coord;
  c.value = std::clamp(c.value + st.sign * c.step, c.lower, c.upper);
  st.pending = true;
  ++st.epoch;

  // alternate sign, then advance coordinate: +c0, -c0, +c1, -c1, ...
  if (st.sign > 0) {
    st.sign = -1;
  } else {
    st.sign = +1;
    st.coord = (st.coord + 1) % p.size();
  }
}

// --- offline hill climbing -----------------------------------------------------

struct EvalPoint {
  PolicyVector policy;
  double mean_j = 0.0;
  double var_j = 0.0;
  bool accepted = false;
};

struct HillClimbResult {
  PolicyVector best;
  double best_j = 0.0;
  double best_var = 0.0;
  std::vector<EvalPoint> trace;
  int evaluations = 0;
  bool budget_exhausted = false;
};

// Coordinate pattern search with multiplicative step decay.  The evaluator
// returns (mean J, variance of J) for a candidate policy.  Stops when every
// searchable step has shrunk below 1e-3 of its initial size, or flags
// exhaustion once max_evals is spent and returns the best point found.
inline HillClimbResult hill_climb_offline(
    const std::function<std::pair<double, double>(const PolicyVector&)>& evaluate,
    PolicyVector p0, double eps_tol, int max_evals, double step_decay = 0.5) {
  validate_policy(p0);
  if (!(step_decay > 0.0 && step_decay < 1.0))
    throw InvalidArgument("hill_climb_offline: step_decay must lie in (0,1)");
  if (!(eps_tol >= 0.0)) throw InvalidArgument("hill_climb_offline: eps_tol must be >= 0");
  if (max_evals < 1) throw InvalidArgument("hill_climb_offline: max_evals must be >= 1");
  if (!detail::any_searchable(p0))
    throw InvalidArgument("hill_climb_offline: no searchable coordinate");

  HillClimbResult res;
  std::vector<double> step(p0.size()), floor(p0.size());
  for (std::size_t i = 0; i < p0.size(); ++i) {
    step[i] = p0.coords[i].step;
    floor[i] = 1e-3 * p0.coords[i].step;
  }

  auto run_eval = [&](const PolicyVector& p) {
    const auto [m, v] = evaluate(p);
    ++res.evaluations;
    res.trace.push_back({p, m, v, false});
    return std::make_pair(m, v);
  };

  auto [inc_j, inc_v] = run_eval(p0);
  res.trace.back().accepted = true;
  res.best = p0;
  res.best_j = inc_j;
  res.best_var = inc_v;

  for (;;) {
    bool all_floored = true;
    for (std::size_t i = 0; i < p0.size(); ++i)
      if (p0.coords[i].search && step[i] >= floor[i]) all_floored = false;
    if (all_floored) break;

    double cand_j = -std::numeric_limits<double>::infinity();
    double cand_v = 0.0;
    PolicyVector cand;
    std::size_t cand_trace = 0;
    bool have_cand = false;
    for (std::size_t i = 0; i < res.best.size(); ++i) {
      if (!res.best.coords[i].search || step[i] < floor[i]) continue;
      for (int sign : {+1, -1}) {
        PolicyVector nb = res.best;
        auto& c = nb.coords[i];
        const double nv = std::clamp(c.value + sign * step[i], c.lower, c.upper);
        if (nv == c.value) continue;  // clamped to a no-op
        c.value = nv;
        if (res.evaluations >= max_evals) {
          res.budget_exhausted = true;
          return res;
        }
        const auto [m, v] = run_eval(nb);
        if (!have_cand || m > cand_j) {
          cand_j = m;
          cand_v = v;
          cand = nb;
          cand_trace = res.trace.size() - 1;
          have_cand = true;
        }
      }
    }
    if (have_cand && cand_j > res.best_j + eps_tol) {
      res.best = cand;
      res.best_j = cand_j;
      res.best_var = cand_v;
      res.trace[cand_trace].accepted = true;
    } else {
      for (auto& s : step) s *= step_decay;
    }
  }
  return res;
}

// --- structural causal model -----------------------------------------------------

struct ScmEdge {
  std::string from;
  std::string to;
  bool cross_step = false;  // lagged edge (t -> t+1); exempt from the acyclicity check
};

struct ScmGraph {
  std::vector<std::string> variables;
  std::vector<ScmEdge> edges;
  std::optional<PolicyVector> intervention;
  std::string policy_variable = "P";
};

// Within-slice edges must form a DAG; every endpoint must be declared.
inline void validate_scm(const ScmGraph& g) {
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < g.variables.size(); ++i) {
    if (!index.emplace(g.variables[i], static_cast<int>(i)).second)
      throw InvalidArgument("scm: duplicate variable '" + g.variables[i] + "'");
  }
  for (const auto& e : g.edges) {
    if (!index.count(e.from)) throw UnknownVariable("scm: unknown variable '" + e.from + "'");
    if (!index.count(e.to)) throw UnknownVariable("scm: unknown variable '" + e.to + "'");
  }
  const int n = static_cast<int>(g.variables.size());
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : g.edges)
    if (!e.cross_step) adj[index[e.from]].push_back(index[e.to]);
  std::vector<int> state(n, 0);  // 0 unvisited, 1 on stack, 2 done
  std::vector<int> stack, path;
  std::function<void(int)> dfs = [&](int u) {
    state[u] = 1;
    path.push_back(u);
    for (int v : adj[u]) {
      if (state[v] == 1) {
        std::string cycle;
        bool in = false;
        for (int w : path) {
          if (w == v) in = true;
          if (in) cycle += g.variables[w] + " -> ";
        }
        cycle += g.variables[v];
        throw CycleDetected("scm: cycle " + cycle);
      }
      if (state[v] == 0) dfs(v);
    }
    path.pop_back();
    state[u] = 2;
  };
  for (int u = 0; u < n; ++u)
    if (state[u] == 0) dfs(u);
}

// do(P = p): removes every lagged feedback edge into the policy variable and
// pins the policy.  Values outside coordinate bounds are rejected.
inline ScmGraph apply_intervention(ScmGraph g, const PolicyVector& pinned) {
  validate_scm(g);
  for (const auto& c : pinned.coords)
    if (!(c.value >= c.lower && c.value <= c.upper))
      throw OutOfBounds("do(" + c.name + "=" + fmt_double(c.value) + "): outside [" +
                        fmt_double(c.lower) + "," + fmt_double(c.upper) + "]");
  std::vector<ScmEdge> kept;
  for (const auto& e : g.edges)
    if (!(e.cross_step && e.to == g.policy_variable)) kept.push_back(e);
  g.edges = std::move(kept);
  g.intervention = pinned;
  return g;
}

}  // namespace coadapt
