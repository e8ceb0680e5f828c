#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <span>
#include <vector>

#include "coadapt/error.hpp"
#include "coadapt/stats.hpp"

namespace coadapt {

// Exponential-smoothing estimate of the policy vector and its per-step drift,
// plus a bounded window of raw observations for trend detection.
struct BeliefState {
  std::vector<double> p_hat;
  std::vector<double> g_hat;
  std::deque<std::vector<double>> history;  // most recent at back
  std::size_t max_history = 8;
};

inline BeliefState make_belief(const std::vector<double>& p0, std::size_t max_history = 8) {
  if (max_history < 4) throw InvalidArgument("make_belief: history window must hold >= 4");
  BeliefState b;
  b.p_hat = p0;
  b.g_hat.assign(p0.size(), 0.0);
  b.history.push_back(p0);
  b.max_history = max_history;
  return b;
}

// p_hat' = beta*p + (1-beta)*p_hat ; g_hat' = beta*(p - p_prev) + (1-beta)*g_hat
inline void belief_update(BeliefState& b, std::span<const double> p_t, double beta_b) {
  if (!(beta_b > 0.0 && beta_b <= 1.0))
    throw InvalidArgument("belief_update: beta_b must lie in (0,1]");
  if (p_t.size() != b.p_hat.size())
    throw DimensionMismatch("belief_update: observed " + std::to_string(p_t.size()) +
                            " coords, believed " + std::to_string(b.p_hat.size()));
  const std::vector<double>& prev = b.history.back();
  for (std::size_t i = 0; i < p_t.size(); ++i) {
    b.g_hat[i] = beta_b * (p_t[i] - prev[i]) + (1.0 - beta_b) * b.g_hat[i];
    b.p_hat[i] = beta_b * p_t[i] + (1.0 - beta_b) * b.p_hat[i];
  }
  b.history.emplace_back(p_t.begin(), p_t.end());
  while (b.history.size() > b.max_history) b.history.pop_front();
}

// Linear extrapolation of one believed coordinate, floored at zero.
inline double anticipated_price(const BeliefState& b, std::size_t coord, int lookahead) {
  if (coord >= b.p_hat.size()) throw DimensionMismatch("anticipated_price: coord out of range");
  if (lookahead < 0) throw InvalidArgument("anticipated_price: lookahead must be >= 0");
  return std::max(0.0, b.p_hat[coord] + static_cast<double>(lookahead) * b.g_hat[coord]);
}

// True when the least-squares slope over the last four observed values of the
// coordinate exceeds the threshold.
inline bool trend_predicate(const BeliefState& b, std::size_t coord, double threshold) {
  if (coord >= b.p_hat.size()) throw DimensionMismatch("trend_predicate: coord out of range");
  if (b.history.size() < 4)
    throw InsufficientHistory("trend_predicate: needs 4 observations, have " +
                              std::to_string(b.history.size()));
  double v[4];
  const std::size_t start = b.history.size() - 4;
  for (std::size_t k = 0; k < 4; ++k) v[k] = b.history[start + k][coord];
  return ls_slope(std::span<const double>(v, 4)) > threshold;
}

struct AgentState {
  int id = 0;
  double theta = 0.0;  // baseline action
  double eta = 0.0;    // price responsiveness
  double x = 0.0;      // current action
  int node = 0;
  BeliefState belief;
};

// Fixed rule: the agent emits/consumes its baseline.
inline double static_action(const AgentState& a) { return a.theta; }

// x' = clamp(x + rho*(baseline - x) - eta*(price + congestion), 0, x_max).
// baseline defaults to theta; the engine passes the exogenously scaled value.
inline double adaptive_update(const AgentState& a, double effective_price, double congestion,
                              double rho, double x_max, double baseline) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidArgument("adaptive_update: rho outside [0,1]");
  if (!(x_max > 0.0)) throw InvalidArgument("adaptive_update: x_max must be positive");
  const double next =
      a.x + rho * (baseline - a.x) - a.eta * (effective_price + congestion);
  return std::clamp(next, 0.0, x_max);
}

inline double adaptive_update(const AgentState& a, double effective_price, double congestion,
                              double rho, double x_max) {
  return adaptive_update(a, effective_price, congestion, rho, x_max, a.theta);
}

}  // namespace coadapt
