#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coadapt/analysis.hpp"
#include "coadapt/config.hpp"
#include "coadapt/csv.hpp"
#include "coadapt/diagnostics.hpp"
#include "coadapt/engine.hpp"

namespace coadapt {

// Per-step trajectory.  The comment line carries run identity so downstream
// tools can verify provenance without a side channel.
inline void write_run_csv(const std::filesystem::path& path, const RunResult& r) {
  CsvWriter w(path);
  w.comment("config_hash=" + r.config_hash + " seed=" + std::to_string(r.master_seed) +
            " rep=" + std::to_string(r.rep) + " regime=" + regime_name(r.regime));
  std::vector<std::string> header = {"t", "aggregate", "overload", "volatility", "phi"};
  for (const auto& name : r.policy_names) header.push_back(name);
  const std::size_t n_loads = r.steps.empty() ? 0 : r.steps.front().node_loads.size();
  for (std::size_t j = 0; j < n_loads; ++j) header.push_back("load_" + std::to_string(j));
  w.row(header);
  for (std::size_t t = 0; t < r.steps.size(); ++t) {
    const StepRecord& s = r.steps[t];
    std::vector<std::string> row = {std::to_string(t), fmt_double(s.aggregate),
                                    fmt_double(s.overload), fmt_double(s.volatility),
                                    fmt_double(s.phi)};
    for (double v : s.policy) row.push_back(fmt_double(v));
    for (double v : s.node_loads) row.push_back(fmt_double(v));
    w.row(row);
  }
}

inline RunResult read_run_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  RunResult r;
  const int ct = t.require_column("t");
  const int ca = t.require_column("aggregate");
  const int co = t.require_column("overload");
  const int cv = t.require_column("volatility");
  const int cp = t.require_column("phi");
  std::vector<int> policy_cols;
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    const int sj = static_cast<int>(j);
    if (sj == ct || sj == ca || sj == co || sj == cv || sj == cp) continue;
    if (t.header[j].rfind("load_", 0) == 0) continue;
    policy_cols.push_back(sj);
    r.policy_names.push_back(t.header[j]);
  }
  for (const auto& row : t.rows) {
    StepRecord s;
    s.aggregate = parse_double(row[ca]);
    s.overload = parse_double(row[co]);
    s.volatility = parse_double(row[cv]);
    s.phi = parse_double(row[cp]);
    for (int j : policy_cols) s.policy.push_back(parse_double(row[j]));
    r.steps.push_back(std::move(s));
  }
  for (const auto& c : t.comments) {
    const auto pos = c.find("config_hash=");
    if (pos != std::string::npos) r.config_hash = c.substr(pos + 12, 16);
    const auto sp = c.find("seed=");
    if (sp != std::string::npos)
      r.master_seed = std::strtoull(c.c_str() + sp + 5, nullptr, 10);
  }
  return r;
}

// Seeds serialize as strings: 64-bit values survive consumers that read JSON
// numbers as doubles.
inline json summary_json(const SimConfig& c, const ReplicateSummary& s) {
  json j;
  j["config_hash"] = config_fingerprint(c);
  j["seed"] = std::to_string(c.master_seed);
  j["scenario"] = scenario_kind_name(c.scenario);
  j["regime"] = regime_name(c.regime);
  j["replications"] = c.replications;
  j["mean_J"] = s.mean_j;
  j["var_J"] = s.var_j;
  j["runs"] = json::array();
  for (const auto& r : s.runs) {
    json jr;
    jr["rep"] = r.rep;
    jr["J"] = r.j;
    jr["mean_aggregate"] = r.mean_aggregate;
    jr["overload_freq"] = r.overload_freq;
    jr["seed"] = std::to_string(r.master_seed);
    jr["config_hash"] = r.config_hash;
    jr["regime"] = regime_name(r.regime);
    j["runs"].push_back(jr);
  }
  return j;
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

inline void write_features_csv(const std::filesystem::path& path,
                               const std::vector<RunFeatures>& feats,
                               const std::vector<int>* clusters = nullptr,
                               const std::string& comment = "") {
  CsvWriter w(path);
  if (!comment.empty()) w.comment(comment);
  std::vector<std::string> header = {"run_id", "mean_aggregate", "overload_freq",
                                     "h_mu",   "C_mu",           "E_pred",
                                     "regime", "label"};
  if (clusters) header.push_back("cluster");
  w.row(header);
  for (std::size_t i = 0; i < feats.size(); ++i) {
    const auto& f = feats[i];
    std::vector<std::string> row = {f.run_id,
                                    fmt_double(f.mean_aggregate),
                                    fmt_double(f.overload_freq),
                                    fmt_double(f.h_mu),
                                    fmt_double(f.c_mu),
                                    fmt_double(f.e_pred),
                                    f.regime,
                                    f.label};
    if (clusters) row.push_back(std::to_string((*clusters)[i]));
    w.row(row);
  }
}

inline std::vector<RunFeatures> read_features_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const int cid = t.require_column("run_id");
  const int cma = t.require_column("mean_aggregate");
  const int cof = t.require_column("overload_freq");
  const int chm = t.require_column("h_mu");
  const int ccm = t.require_column("C_mu");
  const int cep = t.require_column("E_pred");
  const int crg = t.column("regime");
  const int clb = t.column("label");
  std::vector<RunFeatures> feats;
  for (const auto& row : t.rows) {
    RunFeatures f;
    f.run_id = row[cid];
    f.mean_aggregate = parse_double(row[cma]);
    f.overload_freq = parse_double(row[cof]);
    f.h_mu = parse_double(row[chm]);
    f.c_mu = parse_double(row[ccm]);
    f.e_pred = parse_double(row[cep]);
    if (crg >= 0) f.regime = row[crg];
    if (clb >= 0) f.label = row[clb];
    feats.push_back(std::move(f));
  }
  if (feats.empty()) throw DataError(path.string() + ": no feature rows");
  return feats;
}

inline void write_morris_csv(const std::filesystem::path& path, const MorrisResult& m,
                             const std::string& comment = "") {
  CsvWriter w(path);
  if (!comment.empty()) w.comment(comment);
  w.row({"param", "mu", "mu_star", "sigma"});
  for (const auto& r : m.rows) w.row({r.param, fmt_double(r.mu), fmt_double(r.mu_star),
                                      fmt_double(r.sigma)});
}

inline json diagnostics_json(const EntropyRateResult& h, const PredictiveInfoResult& e,
                             const EpsilonMachine& m, TrajectoryClass cls,
                             const SymbolSeries& sym) {
  json j;
  j["alphabet"] = sym.alphabet;
  j["degenerate"] = sym.degenerate;
  j["h_mu"] = h.h_mu;
  j["h_mu_machine"] = machine_entropy_rate(m);
  j["C_mu"] = statistical_complexity(m);
  j["E_pred"] = e.e_pred;
  j["n_states"] = static_cast<int>(m.states.size());
  j["l_used"] = m.l_used;
  j["classification"] = trajectory_class_name(cls);
  j["warnings"] = json::array();
  for (const auto& w : h.warnings) j["warnings"].push_back(w);
  for (const auto& w : e.warnings) j["warnings"].push_back(w);
  for (const auto& w : m.warnings) j["warnings"].push_back(w);
  return j;
}

}  // namespace coadapt
