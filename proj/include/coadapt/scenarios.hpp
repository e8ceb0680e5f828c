#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "coadapt/behavior.hpp"
#include "coadapt/config.hpp"
#include "coadapt/control.hpp"
#include "coadapt/environment.hpp"
#include "coadapt/population.hpp"
#include "coadapt/rng.hpp"

namespace coadapt {

// Which policy coordinates play which economic role.  Both case studies share
// one engine: the emissions study prices the action (lambda) and rebates part
// of it (sigma); the grid study prices the action (lambda) and moves the
// congestion threshold (tau).  Missing roles resolve to -1.
struct PolicyRoles {
  int price = -1;    // "lambda"
  int subsidy = -1;  // "sigma"
  int tau = -1;      // "tau"
};

inline PolicyRoles map_policy_roles(const PolicyVector& p) {
  PolicyRoles r;
  r.price = p.index_of("lambda");
  r.subsidy = p.index_of("sigma");
  r.tau = p.index_of("tau");
  return r;
}

// Time-slice causal structure shared by both studies.  The lagged Phi -> P
// edge exists only when the regime lets the policy respond; do() removes it.
inline ScmGraph default_scm(const SimConfig& c) {
  ScmGraph g;
  g.variables = {"theta", "eta", "P", "x", "E", "O", "V", "Phi"};
  g.edges = {{"theta", "x", false}, {"eta", "x", false}, {"P", "x", false},
             {"x", "E", false},     {"E", "O", false},   {"E", "V", false},
             {"E", "Phi", false},   {"O", "Phi", false}, {"V", "Phi", false}};
  if (policy_varies(c.regime)) g.edges.push_back({"Phi", "P", true});
  validate_scm(g);
  return g;
}

// Exogenous demand multiplier at step t.  The sinusoidal part is a
// deterministic function of t; the gaussian part always consumes exactly one
// normal draw per step so runs with equal shock specs share stream positions.
inline double shock_scale(const ShockSpec& s, int t, Rng& rng) {
  double scale = 1.0;
  if (s.kind == ShockSpec::Kind::Sinusoid || s.kind == ShockSpec::Kind::Mixed)
    scale *= 1.0 + s.amplitude *
                       std::sin(2.0 * std::numbers::pi * static_cast<double>(t) /
                                static_cast<double>(s.period));
  if (s.kind == ShockSpec::Kind::Gaussian || s.kind == ShockSpec::Kind::Mixed)
    scale *= std::max(0.0, 1.0 + rng.normal(0.0, s.sigma));
  return std::max(0.0, scale);
}

struct World {
  std::vector<AgentState> agents;
  Topology topo;
  std::vector<double> base_capacity;
};

// Uniform capacities follow the piecewise-constant schedule; heterogeneous
// capacities from a topology file ignore it (schedule + topology_csv is
// rejected at build).
inline std::vector<double> capacities_at(const World& w, const EnvSpec& env, int t) {
  std::vector<double> caps = w.base_capacity;
  double v = -1.0;
  for (const auto& [t0, cv] : env.capacity_schedule) {
    if (t0 <= t) v = cv;
    else break;
  }
  if (v > 0.0) std::fill(caps.begin(), caps.end(), v);
  return caps;
}

// Instantiates one replication: roster, node assignment, topology, beliefs.
// Stream keys depend only on (master seed, rep, purpose), never on the config
// hash, so distinct configs run under common random numbers.
inline World build_world(const SimConfig& c, std::uint64_t master, int rep) {
  World w;

  SyntheticPopulation pop;
  if (!c.population_csv.empty()) {
    pop = read_population_csv(c.population_csv);
    if (pop.agents.empty()) throw DataError(c.population_csv + ": empty roster");
  } else {
    pop.agents.resize(c.n_agents);
    for (int i = 0; i < c.n_agents; ++i) pop.agents[i].id = i;
    draw_behavioral_attributes(pop, c.theta_prior, c.eta_prior,
                               split_seed(master, static_cast<std::uint64_t>(rep),
                                          kStreamPopulation));
  }
  const std::size_t n = pop.agents.size();

  if (!c.env.topology_csv.empty()) {
    w.topo.nodes = load_topology_csv(c.env.topology_csv);
    if (!c.env.edges_csv.empty())
      w.topo.edges = load_edges_csv(c.env.edges_csv, w.topo.nodes);
    if (!c.env.capacity_schedule.empty())
      throw SchemaError("environment: capacity_schedule requires uniform capacity");
  } else {
    const double cap = c.env.capacity > 0.0 ? c.env.capacity : static_cast<double>(n);
    for (int j = 0; j < c.env.nodes; ++j)
      w.topo.nodes.push_back({.id = j, .capacity = cap, .sector = ""});
  }
  const std::size_t m = w.topo.nodes.size();

  if (c.env.assignment == "population") {
    w.topo.assignment.reserve(n);
    for (const auto& a : pop.agents) {
      if (a.node < 0 || a.node >= static_cast<int>(m))
        throw DataError("agent " + std::to_string(a.id) + ": node " +
                        std::to_string(a.node) + " outside topology");
      w.topo.assignment.push_back(a.node);
    }
  } else {
    Rng arng(split_seed(master, static_cast<std::uint64_t>(rep), kStreamAssignment));
    w.topo.assignment = assign_agents_random(n, m, arng);
  }
  validate_topology(w.topo);

  w.base_capacity.resize(m);
  for (std::size_t j = 0; j < m; ++j) w.base_capacity[j] = w.topo.nodes[j].capacity;

  const std::vector<double> p0 = c.policy.values();
  const bool adapt = agents_adapt(c.regime);
  w.agents.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    AgentState a;
    a.id = pop.agents[i].id;
    a.theta = pop.agents[i].theta;
    a.eta = adapt ? pop.agents[i].eta : 0.0;
    a.x = std::clamp(a.theta, 0.0, c.x_max);
    a.node = w.topo.assignment[i];
    a.belief = make_belief(p0, static_cast<std::size_t>(c.belief_history));
    w.agents.push_back(std::move(a));
  }
  return w;
}

}  // namespace coadapt
