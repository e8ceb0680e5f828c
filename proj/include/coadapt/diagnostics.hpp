#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "coadapt/csv.hpp"
#include "coadapt/error.hpp"
#include "coadapt/stats.hpp"

namespace coadapt {

// --- symbolization -----------------------------------------------------------

struct SymbolSeries {
  std::vector<int> symbols;
  int alphabet = 2;
  std::vector<double> edges;  // bin edges actually used
  bool degenerate = false;    // constant input
};

// Empirical-quantile binning into A symbols; a value equal to an edge goes to
// the lower bin.  A constant series maps to all zeros and is flagged.
inline SymbolSeries symbolize(const std::vector<double>& series, int alphabet) {
  if (alphabet < 2) throw InvalidArgument("symbolize: alphabet must be >= 2");
  if (series.size() < 2) throw SeriesTooShort("symbolize: need at least 2 values");
  SymbolSeries out;
  out.alphabet = alphabet;
  std::vector<double> sorted = series;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) {
    out.degenerate = true;
    out.symbols.assign(series.size(), 0);
    return out;
  }
  const std::size_t n = sorted.size();
  for (int k = 1; k < alphabet; ++k) {
    const std::size_t idx = static_cast<std::size_t>(std::ceil(
        static_cast<double>(k) * static_cast<double>(n) / alphabet)) - 1;
    out.edges.push_back(sorted[std::min(idx, n - 1)]);
  }
  out.symbols.reserve(series.size());
  for (double v : series) {
    int s = 0;
    for (double e : out.edges)
      if (v > e) ++s;
    out.symbols.push_back(s);
  }
  return out;
}

// Binary indicator for overload episodes: 1 whenever the metric is positive.
inline SymbolSeries symbolize_indicator(const std::vector<double>& series) {
  if (series.size() < 2) throw SeriesTooShort("symbolize_indicator: need at least 2 values");
  SymbolSeries out;
  out.alphabet = 2;
  out.edges = {0.0};
  bool any0 = false, any1 = false;
  for (double v : series) {
    out.symbols.push_back(v > 0.0 ? 1 : 0);
    (v > 0.0 ? any1 : any0) = true;
  }
  out.degenerate = !(any0 && any1);
  return out;
}

// --- block entropies -----------------------------------------------------------

namespace detail {

inline std::uint64_t pow_u64(std::uint64_t base, int exp) {
  std::uint64_t v = 1;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

// Circular overlapping block counts: every position contributes one block, so
// the empirical block law is exactly shift-invariant.  That makes H(L)
// nondecreasing and h(L) nonincreasing by construction rather than up to
// sampling slack.
inline std::unordered_map<std::uint64_t, double> block_counts(const SymbolSeries& s, int L) {
  const std::size_t n = s.symbols.size();
  if (L < 1) throw InvalidArgument("block_counts: L must be >= 1");
  if (static_cast<std::size_t>(L) > n)
    throw BlockTooLong("block length " + std::to_string(L) + " exceeds series length " +
                       std::to_string(n));
  if (L * std::log2(static_cast<double>(s.alphabet)) > 40.0)
    throw BlockTooLong("block length " + std::to_string(L) + " too long for alphabet " +
                       std::to_string(s.alphabet));
  std::unordered_map<std::uint64_t, double> counts;
  const std::uint64_t A = static_cast<std::uint64_t>(s.alphabet);
  const std::uint64_t mod = pow_u64(A, L);
  std::uint64_t code = 0;
  for (int k = 0; k < L; ++k) code = code * A + static_cast<std::uint64_t>(s.symbols[k]);
  counts[code] += 1.0;
  for (std::size_t t = 1; t < n; ++t) {
    const std::size_t incoming = (t + static_cast<std::size_t>(L) - 1) % n;
    code = (code * A + static_cast<std::uint64_t>(s.symbols[incoming])) % mod;
    counts[code] += 1.0;
  }
  return counts;
}

}  // namespace detail

// Plug-in Shannon entropy of the L-block distribution, in bits.
inline double block_entropy(const SymbolSeries& s, int L) {
  const auto counts = detail::block_counts(s, L);
  std::vector<double> c;
  c.reserve(counts.size());
  for (const auto& kv : counts) c.push_back(kv.second);
  return entropy_bits(c);
}

struct EntropyRateResult {
  double h_mu = 0.0;
  int l_used = 0;
  std::vector<double> h_curve;  // h(L) = H(L) - H(L-1), L = 1..l_used
  std::vector<std::string> warnings;
};

// Block-difference estimator h = H(L_max) - H(L_max - 1).
inline EntropyRateResult entropy_rate(const SymbolSeries& s, int l_max) {
  if (l_max < 1) throw InvalidArgument("entropy_rate: l_max must be >= 1");
  EntropyRateResult res;
  res.l_used = l_max;
  const double needed = 10.0 * std::pow(static_cast<double>(s.alphabet), l_max);
  if (static_cast<double>(s.symbols.size()) < needed)
    res.warnings.push_back("series length " + std::to_string(s.symbols.size()) +
                           " below recommended " + fmt_double(needed) + " for L=" +
                           std::to_string(l_max));
  double prev = 0.0;
  for (int L = 1; L <= l_max; ++L) {
    const double h = block_entropy(s, L);
    res.h_curve.push_back(h - prev);
    prev = h;
  }
  res.h_mu = res.h_curve.back();
  return res;
}

struct PredictiveInfoResult {
  double e_pred = 0.0;
  int l = 0;
  std::vector<std::string> warnings;
};

// E(L) = 2 H(L) - H(2L): mutual information between adjacent L-blocks.
inline PredictiveInfoResult predictive_information(const SymbolSeries& s, int L) {
  PredictiveInfoResult res;
  res.l = L;
  const double e = 2.0 * block_entropy(s, L) - block_entropy(s, 2 * L);
  if (e < 0.0) {
    if (e < -0.01)
      res.warnings.push_back("negative predictive information " + fmt_double(e) + " clamped");
    res.e_pred = 0.0;
  } else {
    res.e_pred = e;
  }
  return res;
}

// --- epsilon-machine reconstruction ---------------------------------------------

struct CausalState {
  std::vector<std::uint64_t> histories;  // leaf suffix codes, oldest symbol most significant
  std::vector<double> next_counts;       // pooled next-symbol counts over members
  std::vector<double> p_next;
  std::vector<int> successor;            // -1: never observed
};

struct EpsilonMachine {
  int alphabet = 2;
  int l_used = 0;
  std::vector<CausalState> states;
  std::vector<double> pi;
  int skipped_histories = 0;
  std::vector<std::string> warnings;
};

namespace detail {

// Two-sample chi-squared on next-symbol counts with pooled expectations;
// Yates continuity correction when df = 1.  Returns the p-value.
inline double next_symbol_test(const std::vector<double>& c1, const std::vector<double>& c2) {
  const std::size_t A = c1.size();
  double n1 = 0.0, n2 = 0.0;
  for (std::size_t a = 0; a < A; ++a) {
    n1 += c1[a];
    n2 += c2[a];
  }
  if (n1 <= 0.0 || n2 <= 0.0) return 1.0;
  int df = -1;
  double stat = 0.0;
  bool yates_pending = false;
  std::vector<double> e1(A), e2(A);
  int nonzero = 0;
  for (std::size_t a = 0; a < A; ++a)
    if (c1[a] + c2[a] > 0.0) ++nonzero;
  df = nonzero - 1;
  if (df < 1) return 1.0;
  yates_pending = (df == 1);
  for (std::size_t a = 0; a < A; ++a) {
    const double tot = c1[a] + c2[a];
    if (tot <= 0.0) continue;
    const double p = tot / (n1 + n2);
    const double ex1 = n1 * p, ex2 = n2 * p;
    double d1 = std::fabs(c1[a] - ex1), d2 = std::fabs(c2[a] - ex2);
    if (yates_pending) {
      d1 = std::max(0.0, d1 - 0.5);
      d2 = std::max(0.0, d2 - 0.5);
    }
    stat += d1 * d1 / ex1 + d2 * d2 / ex2;
  }
  return chi2_sf(stat, df);
}

struct HistoryTable {
  // key: length << 48 | code
  std::unordered_map<std::uint64_t, std::vector<double>> counts;
  static std::uint64_t key(int len, std::uint64_t code) {
    return (static_cast<std::uint64_t>(len) << 48) | code;
  }
};

}  // namespace detail

// CSSR-style reconstruction.  Histories of increasing length are tested
// against the next-symbol distribution of their parent's state (then against
// every other state) with a chi-squared two-sample test; rejection everywhere
// founds a new state.  The significance level is Bonferroni-corrected by the
// number of histories tested at each depth, so alpha_sig bounds the chance of
// a spurious split per level rather than per comparison.  The final machine
// lives on the maximal-depth suffixes, split until unifilar.
inline EpsilonMachine reconstruct_epsilon_machine(const SymbolSeries& s, int l_max,
                                                  double alpha_sig = 0.005, int n_min = 10) {
  const int A = s.alphabet;
  const std::size_t n = s.symbols.size();
  if (l_max < 1) throw InvalidArgument("reconstruct: l_max must be >= 1");
  if (!(alpha_sig > 0.0 && alpha_sig < 1.0))
    throw InvalidArgument("reconstruct: alpha_sig must lie in (0,1)");
  if (n < static_cast<std::size_t>(l_max) + 2)
    throw SeriesTooShort("reconstruct: series shorter than l_max + 2");
  if (l_max * std::log2(static_cast<double>(A)) > 40.0)
    throw BlockTooLong("reconstruct: A^l_max too large");

  EpsilonMachine m;
  m.alphabet = A;

  // Next-symbol counts for every suffix of length 0..l_max (linear scan).
  detail::HistoryTable table;
  for (std::size_t t = 0; t + 1 < n; ++t) {
    const int next = s.symbols[t + 1];
    std::uint64_t code = 0;
    std::uint64_t sig = 1;
    for (int len = 0; len <= l_max && static_cast<std::size_t>(len) <= t + 1; ++len) {
      if (len > 0) {
        code += static_cast<std::uint64_t>(s.symbols[t + 1 - len]) * sig;
        sig *= static_cast<std::uint64_t>(A);
      }
      auto& c = table.counts[detail::HistoryTable::key(len, code)];
      if (c.empty()) c.assign(A, 0.0);
      c[next] += 1.0;
    }
  }

  struct ProtoState {
    std::vector<double> counts;
  };
  std::vector<ProtoState> proto;
  std::unordered_map<std::uint64_t, int> assignment;

  const auto& root = table.counts[detail::HistoryTable::key(0, 0)];
  proto.push_back({root});
  assignment[detail::HistoryTable::key(0, 0)] = 0;

  for (int len = 1; len <= l_max; ++len) {
    std::vector<std::uint64_t> codes;
    for (const auto& kv : table.counts) {
      if (static_cast<int>(kv.first >> 48) != len) continue;
      double tot = 0.0;
      for (double c : kv.second) tot += c;
      if (tot >= static_cast<double>(n_min)) codes.push_back(kv.first & 0xFFFFFFFFFFFFULL);
      else ++m.skipped_histories;
    }
    std::sort(codes.begin(), codes.end());
    const double alpha_level = alpha_sig / static_cast<double>(std::max<std::size_t>(1, codes.size()));
    const std::uint64_t parent_mod = detail::pow_u64(static_cast<std::uint64_t>(A), len - 1);
    for (std::uint64_t code : codes) {
      const auto& hc = table.counts[detail::HistoryTable::key(len, code)];
      const std::uint64_t parent_key = detail::HistoryTable::key(len - 1, code % parent_mod);
      const auto pit = assignment.find(parent_key);
      int target = -1;
      if (pit != assignment.end() &&
          detail::next_symbol_test(hc, proto[pit->second].counts) >= alpha_level)
        target = pit->second;
      if (target < 0) {
        for (std::size_t sid = 0; sid < proto.size(); ++sid) {
          if (pit != assignment.end() && static_cast<int>(sid) == pit->second) continue;
          if (detail::next_symbol_test(hc, proto[sid].counts) >= alpha_level) {
            target = static_cast<int>(sid);
            break;
          }
        }
      }
      if (target < 0) {
        proto.push_back({hc});
        target = static_cast<int>(proto.size()) - 1;
      } else {
        auto& pc = proto[target].counts;
        for (int a = 0; a < A; ++a) pc[a] += hc[a];
      }
      assignment[detail::HistoryTable::key(len, code)] = target;
    }
  }

  // Leaves: deepest level that received any assignment.
  int l_used = 0;
  for (int len = l_max; len >= 1; --len) {
    bool any = false;
    for (const auto& kv : assignment)
      if (static_cast<int>(kv.first >> 48) == len) {
        any = true;
        break;
      }
    if (any) {
      l_used = len;
      break;
    }
  }
  if (l_used == 0) throw SeriesTooShort("reconstruct: no history reached n_min observations");
  if (l_used < l_max)
    m.warnings.push_back("leaf depth reduced to " + std::to_string(l_used) +
                         " (insufficient data at depth " + std::to_string(l_max) + ")");
  m.l_used = l_used;

  std::vector<std::uint64_t> leaves;
  for (const auto& kv : assignment)
    if (static_cast<int>(kv.first >> 48) == l_used)
      leaves.push_back(kv.first & 0xFFFFFFFFFFFFULL);
  std::sort(leaves.begin(), leaves.end());

  // Initial partition of leaves by proto-state, in proto order.
  std::unordered_map<std::uint64_t, int> leaf_state;
  std::vector<std::vector<std::uint64_t>> groups;
  {
    std::map<int, int> remap;
    for (std::uint64_t code : leaves) {
      const int ps = assignment[detail::HistoryTable::key(l_used, code)];
      auto it = remap.find(ps);
      int gid;
      if (it == remap.end()) {
        gid = static_cast<int>(groups.size());
        remap[ps] = gid;
        groups.emplace_back();
      } else {
        gid = it->second;
      }
      groups[gid].push_back(code);
      leaf_state[code] = gid;
    }
  }

  const std::uint64_t drop_mod = detail::pow_u64(static_cast<std::uint64_t>(A), l_used - 1);
  auto successor_code = [&](std::uint64_t code, int a) {
    return (code % drop_mod) * static_cast<std::uint64_t>(A) + static_cast<std::uint64_t>(a);
  };

  // Split until unifilar: members of a state must agree, symbol by symbol, on
  // the state of their successor suffix.  Missing observations are wildcards.
  bool changed = true;
  int dropped_transitions = 0;
  while (changed) {
    changed = false;
    const std::size_t ngroups = groups.size();
    for (std::size_t g = 0; g < ngroups; ++g) {
      if (groups[g].size() <= 1) continue;
      std::vector<std::vector<int>> sig(groups[g].size(), std::vector<int>(A, -1));
      for (std::size_t i = 0; i < groups[g].size(); ++i) {
        const auto& hc = table.counts[detail::HistoryTable::key(l_used, groups[g][i])];
        for (int a = 0; a < A; ++a) {
          if (hc[a] <= 0.0) continue;
          auto it = leaf_state.find(successor_code(groups[g][i], a));
          if (it != leaf_state.end()) sig[i][a] = it->second;
        }
      }
      // greedy wildcard-compatible grouping
      std::vector<int> member_group(groups[g].size(), -1);
      std::vector<std::vector<int>> merged_sigs;
      for (std::size_t i = 0; i < groups[g].size(); ++i) {
        int found = -1;
        for (std::size_t k = 0; k < merged_sigs.size(); ++k) {
          bool ok = true;
          for (int a = 0; a < A; ++a)
            if (sig[i][a] >= 0 && merged_sigs[k][a] >= 0 && sig[i][a] != merged_sigs[k][a]) {
              ok = false;
              break;
            }
          if (ok) {
            found = static_cast<int>(k);
            break;
          }
        }
        if (found < 0) {
          merged_sigs.push_back(sig[i]);
          found = static_cast<int>(merged_sigs.size()) - 1;
        } else {
          for (int a = 0; a < A; ++a)
            if (merged_sigs[found][a] < 0) merged_sigs[found][a] = sig[i][a];
        }
        member_group[i] = found;
      }
      if (merged_sigs.size() > 1) {
        changed = true;
        std::vector<std::vector<std::uint64_t>> parts(merged_sigs.size());
        for (std::size_t i = 0; i < groups[g].size(); ++i)
          parts[member_group[i]].push_back(groups[g][i]);
        groups[g] = parts[0];
        for (std::size_t k = 1; k < parts.size(); ++k) {
          const int nid = static_cast<int>(groups.size());
          for (std::uint64_t code : parts[k]) leaf_state[code] = nid;
          groups.push_back(parts[k]);
        }
      }
    }
  }

  // Assemble states, transition structure and probabilities.
  m.states.resize(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto& st = m.states[g];
    st.histories = groups[g];
    st.next_counts.assign(A, 0.0);
    st.successor.assign(A, -1);
    for (std::uint64_t code : groups[g]) {
      const auto& hc = table.counts[detail::HistoryTable::key(l_used, code)];
      for (int a = 0; a < A; ++a) st.next_counts[a] += hc[a];
    }
    double total = 0.0;
    for (int a = 0; a < A; ++a) {
      if (st.next_counts[a] <= 0.0) continue;
      std::uint64_t succ = 0;
      bool found = false;
      for (std::uint64_t code : groups[g]) {
        const auto& hc = table.counts[detail::HistoryTable::key(l_used, code)];
        if (hc[a] <= 0.0) continue;
        auto it = leaf_state.find(successor_code(code, a));
        if (it != leaf_state.end()) {
          succ = static_cast<std::uint64_t>(it->second);
          found = true;
          break;
        }
      }
      if (found) {
        st.successor[a] = static_cast<int>(succ);
        total += st.next_counts[a];
      } else {
        ++dropped_transitions;  // destination never qualified; drop this mass
        st.next_counts[a] = 0.0;
      }
    }
    st.p_next.assign(A, 0.0);
    if (total > 0.0)
      for (int a = 0; a < A; ++a) st.p_next[a] = st.next_counts[a] / total;
  }
  if (dropped_transitions > 0)
    m.warnings.push_back(std::to_string(dropped_transitions) +
                         " transitions dropped (target below n_min)");

  // Stationary distribution by damped power iteration; the lazy half-step
  // keeps periodic machines convergent without changing the fixed point.
  const std::size_t S = m.states.size();
  std::vector<double> pi(S, 1.0 / static_cast<double>(S)), nxt(S, 0.0);
  for (int iter = 0; iter < 200000; ++iter) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (std::size_t g = 0; g < S; ++g) {
      const auto& st = m.states[g];
      for (int a = 0; a < A; ++a)
        if (st.successor[a] >= 0) nxt[st.successor[a]] += pi[g] * st.p_next[a];
    }
    double norm = 0.0;
    for (std::size_t g = 0; g < S; ++g) {
      nxt[g] = 0.5 * pi[g] + 0.5 * nxt[g];
      norm += nxt[g];
    }
    double delta = 0.0;
    for (std::size_t g = 0; g < S; ++g) {
      nxt[g] /= norm;
      delta += std::fabs(nxt[g] - pi[g]);
    }
    pi.swap(nxt);
    if (delta < 1e-12) break;
  }
  m.pi = pi;
  return m;
}

// Entropy of the stationary state distribution, in bits.
inline double statistical_complexity(const EpsilonMachine& m) { return entropy_bits(m.pi); }

// h = sum_s pi_s H(next-symbol | s), in bits per symbol.
inline double machine_entropy_rate(const EpsilonMachine& m) {
  double h = 0.0;
  for (std::size_t g = 0; g < m.states.size(); ++g)
    h += m.pi[g] * entropy_bits(m.states[g].p_next);
  return h;
}

// --- trajectory classification ---------------------------------------------------

enum class TrajectoryClass { Stationary, Drifting, Cyclic };

inline const char* trajectory_class_name(TrajectoryClass c) {
  switch (c) {
    case TrajectoryClass::Stationary: return "stationary";
    case TrajectoryClass::Drifting: return "drifting";
    case TrajectoryClass::Cyclic: return "cyclic";
  }
  return "?";
}

// Order of tests matters: total least-squares drift against the sample spread
// first, then spectral concentration at a nonzero frequency.
inline TrajectoryClass classify_trajectory(const std::vector<double>& series,
                                           double s_drift = 2.0, double f_cyc = 0.4) {
  const std::size_t n = series.size();
  if (n < 64) throw SeriesTooShort("classify_trajectory: need >= 64 points");
  const double sd = sample_sd(series);
  const double slope = ls_slope(series);
  if (std::fabs(slope) * static_cast<double>(n) > s_drift * sd) return TrajectoryClass::Drifting;

  const double m = mean(series);
  double total = 0.0, peak = 0.0;
  const double two_pi = 2.0 * 3.14159265358979323846;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    const double w = two_pi * static_cast<double>(k) / static_cast<double>(n);
    for (std::size_t t = 0; t < n; ++t) {
      const double y = series[t] - m;
      re += y * std::cos(w * static_cast<double>(t));
      im -= y * std::sin(w * static_cast<double>(t));
    }
    const double p = re * re + im * im;
    total += p;
    peak = std::max(peak, p);
  }
  if (total > 0.0 && peak > f_cyc * total) return TrajectoryClass::Cyclic;
  return TrajectoryClass::Stationary;
}

}  // namespace coadapt
