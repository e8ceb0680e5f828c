#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "coadapt/csv.hpp"
#include "coadapt/error.hpp"
#include "coadapt/rng.hpp"

namespace coadapt {

struct NodeSpec {
  int id = 0;
  double capacity = 0.0;
  std::string sector;
};

struct Topology {
  std::vector<NodeSpec> nodes;
  std::vector<std::pair<int, int>> edges;  // indices into nodes
  std::vector<int> assignment;             // agent -> node index

  std::size_t node_count() const { return nodes.size(); }
};

struct LoadState {
  std::vector<double> node_load;
  double aggregate = 0.0;
};

inline void validate_topology(const Topology& topo) {
  if (topo.nodes.empty()) throw InvalidArgument("topology: no nodes");
  std::map<int, bool> seen;
  for (const auto& n : topo.nodes) {
    if (!(n.capacity > 0.0))
      throw InvalidArgument("topology: node " + std::to_string(n.id) +
                            " has non-positive capacity");
    if (!seen.emplace(n.id, true).second)
      throw InvalidArgument("topology: duplicate node id " + std::to_string(n.id));
  }
  const int m = static_cast<int>(topo.nodes.size());
  for (const auto& e : topo.edges)
    if (e.first < 0 || e.first >= m || e.second < 0 || e.second >= m)
      throw OutOfBounds("topology: edge endpoint out of range");
  for (int a : topo.assignment)
    if (a < 0 || a >= m) throw OutOfBounds("topology: assignment index out of range");
}

// Sums agent actions into their assigned node; aggregate is the sum of node
// loads so that single- and multi-node paths share one definition.
inline LoadState compute_loads(const Topology& topo, const std::vector<double>& actions) {
  if (actions.size() != topo.assignment.size())
    throw DimensionMismatch("compute_loads: " + std::to_string(actions.size()) +
                            " actions vs " + std::to_string(topo.assignment.size()) +
                            " assignments");
  LoadState s;
  s.node_load.assign(topo.nodes.size(), 0.0);
  for (std::size_t i = 0; i < actions.size(); ++i) s.node_load[topo.assignment[i]] += actions[i];
  s.aggregate = 0.0;
  for (double l : s.node_load) s.aggregate += l;
  return s;
}

// c_j = kappa * max(0, L_j / C_j - tau); zero exactly at the threshold.
inline std::vector<double> congestion_signal(const LoadState& loads,
                                             const std::vector<double>& capacities,
                                             double tau, double kappa) {
  if (loads.node_load.size() != capacities.size())
    throw DimensionMismatch("congestion_signal: load/capacity size mismatch");
  if (kappa < 0.0) throw InvalidArgument("congestion_signal: kappa must be >= 0");
  std::vector<double> c(loads.node_load.size());
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (!(capacities[j] > 0.0)) throw InvalidArgument("congestion_signal: capacity <= 0");
    c[j] = kappa * std::max(0.0, loads.node_load[j] / capacities[j] - tau);
  }
  return c;
}

inline std::vector<double> congestion_signal(const LoadState& loads, const Topology& topo,
                                             double tau, double kappa) {
  std::vector<double> caps(topo.nodes.size());
  for (std::size_t j = 0; j < caps.size(); ++j) caps[j] = topo.nodes[j].capacity;
  return congestion_signal(loads, caps, tau, kappa);
}

// Multi-node: fraction of nodes strictly over capacity.  Single node: severity
// max(0, L - C) / C, so mild excursions register instead of saturating at 1.
inline double overload_metric(const LoadState& loads, const std::vector<double>& capacities) {
  if (loads.node_load.size() != capacities.size())
    throw DimensionMismatch("overload_metric: load/capacity size mismatch");
  const std::size_t m = loads.node_load.size();
  if (m == 0) throw InvalidArgument("overload_metric: no nodes");
  if (m == 1) {
    if (!(capacities[0] > 0.0)) throw InvalidArgument("overload_metric: capacity <= 0");
    return std::max(0.0, loads.node_load[0] - capacities[0]) / capacities[0];
  }
  int over = 0;
  for (std::size_t j = 0; j < m; ++j)
    if (loads.node_load[j] > capacities[j]) ++over;
  return static_cast<double>(over) / static_cast<double>(m);
}

inline double overload_metric(const LoadState& loads, const Topology& topo) {
  std::vector<double> caps(topo.nodes.size());
  for (std::size_t j = 0; j < caps.size(); ++j) caps[j] = topo.nodes[j].capacity;
  return overload_metric(loads, caps);
}

// Uniform random node assignment; a single node never consumes randomness so
// single-node scenarios stay stream-aligned regardless of assignment mode.
inline std::vector<int> assign_agents_random(std::size_t n_agents, std::size_t n_nodes,
                                             Rng& rng) {
  if (n_nodes == 0) throw InvalidArgument("assign_agents_random: no nodes");
  std::vector<int> a(n_agents, 0);
  if (n_nodes == 1) return a;
  for (auto& v : a) v = static_cast<int>(rng.below(n_nodes));
  return a;
}

// node_id,capacity[,sector]
inline std::vector<NodeSpec> load_topology_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const int ci = t.require_column("node_id");
  const int cc = t.require_column("capacity");
  const int cs = t.column("sector");
  std::vector<NodeSpec> nodes;
  for (const auto& row : t.rows) {
    NodeSpec n;
    n.id = static_cast<int>(parse_double(row[ci]));
    n.capacity = parse_double(row[cc]);
    if (cs >= 0) n.sector = row[cs];
    nodes.push_back(std::move(n));
  }
  if (nodes.empty()) throw DataError(path.string() + ": no nodes");
  return nodes;
}

// from,to (node ids)
inline std::vector<std::pair<int, int>> load_edges_csv(const std::filesystem::path& path,
                                                       const std::vector<NodeSpec>& nodes) {
  const CsvTable t = read_csv(path);
  const int cf = t.require_column("from");
  const int ct = t.require_column("to");
  std::map<int, int> index;
  for (std::size_t j = 0; j < nodes.size(); ++j) index[nodes[j].id] = static_cast<int>(j);
  std::vector<std::pair<int, int>> edges;
  for (const auto& row : t.rows) {
    const int a = static_cast<int>(parse_double(row[cf]));
    const int b = static_cast<int>(parse_double(row[ct]));
    auto ia = index.find(a), ib = index.find(b);
    if (ia == index.end() || ib == index.end())
      throw DataError(path.string() + ": edge references unknown node");
    edges.emplace_back(ia->second, ib->second);
  }
  return edges;
}

}  // namespace coadapt
