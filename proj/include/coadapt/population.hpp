#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coadapt/csv.hpp"
#include "coadapt/error.hpp"
#include "coadapt/rng.hpp"
#include "coadapt/stats.hpp"

namespace coadapt {

// One marginal table: target count per category of a single dimension.
struct MarginalConstraint {
  std::string dimension;
  std::vector<std::string> categories;
  std::vector<double> targets;
};

// Seed microdata: categorical cells per constrained dimension plus optional
// continuous attributes (missing entries allowed) and a base weight.
struct SeedSample {
  std::vector<std::string> cat_columns;
  std::vector<std::string> num_columns;
  std::vector<std::vector<std::string>> cat_rows;                // [record][col]
  std::vector<std::vector<std::optional<double>>> num_rows;      // [record][col]
  std::vector<double> weights;

  std::size_t size() const { return cat_rows.size(); }
};

struct IpfResult {
  std::vector<double> weights;
  int sweeps = 0;
  double residual = 0.0;
  std::vector<std::string> warnings;
};

struct Agent {
  int id = 0;
  double theta = 0.0;
  double eta = 0.0;
  std::vector<std::string> cat;
  std::vector<std::optional<double>> num;
  int node = -1;
  int source_record = -1;
};

struct SyntheticPopulation {
  std::vector<std::string> cat_columns;
  std::vector<std::string> num_columns;
  std::vector<Agent> agents;
};

struct AttributePrior {
  enum class Kind { Point, Uniform, TruncNormal, Categorical };
  std::string name;
  Kind kind = Kind::Point;
  double value = 0.0;                  // Point
  double a = 0.0, b = 0.0;             // Uniform / TruncNormal bounds
  double mu = 0.0, sigma = 0.0;        // TruncNormal
  std::vector<double> probs;           // Categorical
  std::vector<double> values;          // Categorical outcomes
};

inline AttributePrior point_prior(std::string name, double value) {
  AttributePrior p;
  p.name = std::move(name);
  p.kind = AttributePrior::Kind::Point;
  p.value = value;
  return p;
}

namespace detail {

struct DimBinding {
  int cat_col = -1;
  std::vector<int> record_category;  // per record, index into constraint categories
};

inline std::vector<DimBinding> bind_dimensions(const SeedSample& seed,
                                               const std::vector<MarginalConstraint>& cons) {
  std::vector<DimBinding> out(cons.size());
  for (std::size_t d = 0; d < cons.size(); ++d) {
    const auto& c = cons[d];
    if (c.categories.size() != c.targets.size())
      throw InvalidArgument("marginal '" + c.dimension + "': categories/targets size mismatch");
    if (c.categories.empty())
      throw InvalidArgument("marginal '" + c.dimension + "': no categories");
    double tot = 0.0;
    for (double t : c.targets) {
      if (t < 0.0) throw InvalidArgument("marginal '" + c.dimension + "': negative target");
      tot += t;
    }
    if (tot <= 0.0) throw InvalidArgument("marginal '" + c.dimension + "': all targets zero");
    std::map<std::string, int> index;
    for (std::size_t k = 0; k < c.categories.size(); ++k) {
      if (!index.emplace(c.categories[k], static_cast<int>(k)).second)
        throw InvalidArgument("marginal '" + c.dimension + "': duplicate category '" +
                              c.categories[k] + "'");
    }
    auto it = std::find(seed.cat_columns.begin(), seed.cat_columns.end(), c.dimension);
    if (it == seed.cat_columns.end())
      throw InvalidArgument("seed sample lacks constrained dimension '" + c.dimension + "'");
    out[d].cat_col = static_cast<int>(it - seed.cat_columns.begin());
    out[d].record_category.resize(seed.size());
    for (std::size_t r = 0; r < seed.size(); ++r) {
      const std::string& v = seed.cat_rows[r][out[d].cat_col];
      auto f = index.find(v);
      if (f == index.end())
        throw InvalidArgument("record " + std::to_string(r) + ": category '" + v +
                              "' absent from targets of '" + c.dimension + "'");
      out[d].record_category[r] = f->second;
    }
  }
  return out;
}

}  // namespace detail

// Iterative proportional fitting.  Alternating per-dimension scaling until the
// worst relative marginal error drops below tol.  Structural zeros in the seed
// stay zero.  Inconsistent dimension totals are rescaled to the mean total.
inline IpfResult ipf_fit(const SeedSample& seed, std::vector<MarginalConstraint> constraints,
                         double tol = 1e-8, int max_iter = 1000) {
  if (tol <= 0.0) throw InvalidArgument("ipf_fit: tol must be positive");
  if (max_iter < 1) throw InvalidArgument("ipf_fit: max_iter must be >= 1");
  IpfResult res;
  res.weights = seed.weights;
  for (double w : res.weights)
    if (w < 0.0 || !std::isfinite(w)) throw InvalidArgument("ipf_fit: bad seed weight");
  if (constraints.empty()) {
    res.sweeps = 0;
    return res;
  }
  auto binding = detail::bind_dimensions(seed, constraints);

  double mean_total = 0.0;
  std::vector<double> totals(constraints.size());
  for (std::size_t d = 0; d < constraints.size(); ++d) {
    totals[d] = 0.0;
    for (double t : constraints[d].targets) totals[d] += t;
    mean_total += totals[d];
  }
  mean_total /= static_cast<double>(constraints.size());
  for (std::size_t d = 0; d < constraints.size(); ++d) {
    if (std::fabs(totals[d] - mean_total) > 1e-6 * mean_total) {
      for (auto& t : constraints[d].targets) t *= mean_total / totals[d];
      res.warnings.push_back("marginal '" + constraints[d].dimension + "' total " +
                             fmt_double(totals[d]) + " rescaled to mean total " +
                             fmt_double(mean_total));
    }
  }

  // Categories with positive target but zero seed mass can never be fit.
  for (std::size_t d = 0; d < constraints.size(); ++d) {
    std::vector<double> mass(constraints[d].categories.size(), 0.0);
    for (std::size_t r = 0; r < seed.size(); ++r)
      mass[binding[d].record_category[r]] += seed.weights[r];
    for (std::size_t k = 0; k < mass.size(); ++k)
      if (constraints[d].targets[k] > 0.0 && mass[k] <= 0.0)
        throw EmptyCategory("dimension '" + constraints[d].dimension + "' category '" +
                            constraints[d].categories[k] + "' has zero seed weight");
  }

  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    for (std::size_t d = 0; d < constraints.size(); ++d) {
      const auto& cons = constraints[d];
      std::vector<double> sums(cons.categories.size(), 0.0);
      for (std::size_t r = 0; r < seed.size(); ++r)
        sums[binding[d].record_category[r]] += res.weights[r];
      std::vector<double> factor(cons.categories.size(), 1.0);
      for (std::size_t k = 0; k < sums.size(); ++k) {
        if (cons.targets[k] <= 0.0) {
          factor[k] = 0.0;
        } else if (sums[k] <= 0.0) {
          throw EmptyCategory("dimension '" + cons.dimension + "' category '" +
                              cons.categories[k] + "' lost all weight during fitting");
        } else {
          factor[k] = cons.targets[k] / sums[k];
        }
      }
      for (std::size_t r = 0; r < seed.size(); ++r)
        res.weights[r] *= factor[binding[d].record_category[r]];
    }
    // Residual: worst relative error over every marginal after the sweep.
    double resid = 0.0;
    for (std::size_t d = 0; d < constraints.size(); ++d) {
      const auto& cons = constraints[d];
      std::vector<double> sums(cons.categories.size(), 0.0);
      for (std::size_t r = 0; r < seed.size(); ++r)
        sums[binding[d].record_category[r]] += res.weights[r];
      for (std::size_t k = 0; k < sums.size(); ++k) {
        const double err = cons.targets[k] > 0.0
                               ? std::fabs(sums[k] - cons.targets[k]) / cons.targets[k]
                               : std::fabs(sums[k]) / mean_total;
        resid = std::max(resid, err);
      }
    }
    res.residual = resid;
    res.sweeps = sweep;
    if (resid <= tol) return res;
  }
  throw NonConvergence("ipf_fit: residual " + fmt_double(res.residual) + " after " +
                           std::to_string(max_iter) + " sweeps (tol " + fmt_double(tol) + ")",
                       max_iter, res.residual);
}

// Multinomial draw of n_agents records proportional to fitted weights.
inline SyntheticPopulation sample_population(const std::vector<double>& weights,
                                             const SeedSample& seed, int n_agents,
                                             std::uint64_t rng_seed) {
  if (n_agents <= 0) throw InvalidArgument("sample_population: n_agents must be positive");
  if (weights.size() != seed.size())
    throw InvalidArgument("sample_population: weight/record count mismatch");
  std::vector<double> cum(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) throw InvalidArgument("sample_population: negative weight");
    total += weights[i];
    cum[i] = total;
  }
  if (total <= 0.0) throw InvalidArgument("sample_population: total weight is zero");

  SyntheticPopulation pop;
  pop.cat_columns = seed.cat_columns;
  pop.num_columns = seed.num_columns;
  pop.agents.reserve(static_cast<std::size_t>(n_agents));
  Rng rng(rng_seed);
  for (int i = 0; i < n_agents; ++i) {
    const double u = rng.uniform() * total;
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const std::size_t r = std::min<std::size_t>(
        static_cast<std::size_t>(it - cum.begin()), weights.size() - 1);
    Agent a;
    a.id = i;
    a.cat = seed.cat_rows[r];
    a.num = seed.num_rows.empty() ? std::vector<std::optional<double>>{} : seed.num_rows[r];
    a.source_record = static_cast<int>(r);
    pop.agents.push_back(std::move(a));
  }
  return pop;
}

// Hot-deck imputation: each missing continuous attribute is copied from a
// donor record in the same categorical cell; if the cell has no donor for
// that attribute the whole-sample donor pool is used.
inline void impute_missing(SyntheticPopulation& pop, const SeedSample& seed,
                           std::uint64_t rng_seed) {
  if (pop.num_columns.empty()) return;
  const std::size_t ncols = pop.num_columns.size();

  auto cell_key = [](const std::vector<std::string>& cat) {
    std::string k;
    for (const auto& c : cat) {
      k += c;
      k += '\x1f';
    }
    return k;
  };

  std::vector<std::vector<double>> global(ncols);
  std::map<std::string, std::vector<std::vector<double>>> by_cell;
  for (std::size_t r = 0; r < seed.size(); ++r) {
    const std::string key = cell_key(seed.cat_rows[r]);
    auto& cell = by_cell[key];
    if (cell.empty()) cell.resize(ncols);
    for (std::size_t j = 0; j < ncols; ++j) {
      if (seed.num_rows[r][j]) {
        global[j].push_back(*seed.num_rows[r][j]);
        cell[j].push_back(*seed.num_rows[r][j]);
      }
    }
  }

  Rng rng(rng_seed);
  for (auto& agent : pop.agents) {
    if (agent.num.size() != ncols) agent.num.resize(ncols);
    for (std::size_t j = 0; j < ncols; ++j) {
      if (agent.num[j]) continue;
      const auto it = by_cell.find(cell_key(agent.cat));
      const std::vector<double>* pool = nullptr;
      if (it != by_cell.end() && !it->second[j].empty()) pool = &it->second[j];
      else if (!global[j].empty()) pool = &global[j];
      else
        throw NoDonor("attribute '" + pop.num_columns[j] + "': no donor record has a value");
      agent.num[j] = (*pool)[rng.below(pool->size())];
    }
  }
}

inline void validate_prior(const AttributePrior& p, bool require_nonnegative) {
  switch (p.kind) {
    case AttributePrior::Kind::Point:
      if (!std::isfinite(p.value)) throw InvalidPrior("prior '" + p.name + "': bad point value");
      if (require_nonnegative && p.value < 0.0)
        throw InvalidPrior("prior '" + p.name + "': negative value");
      break;
    case AttributePrior::Kind::Uniform:
      if (!(p.b >= p.a)) throw InvalidPrior("prior '" + p.name + "': requires b >= a");
      if (require_nonnegative && p.a < 0.0)
        throw InvalidPrior("prior '" + p.name + "': support includes negatives");
      break;
    case AttributePrior::Kind::TruncNormal:
      if (!(p.sigma >= 0.0)) throw InvalidPrior("prior '" + p.name + "': sigma must be >= 0");
      if (!(p.b >= p.a)) throw InvalidPrior("prior '" + p.name + "': requires b >= a");
      if (require_nonnegative && p.a < 0.0)
        throw InvalidPrior("prior '" + p.name + "': support includes negatives");
      break;
    case AttributePrior::Kind::Categorical: {
      if (p.probs.size() != p.values.size() || p.probs.empty())
        throw InvalidPrior("prior '" + p.name + "': probs/values mismatch");
      double s = 0.0;
      for (double q : p.probs) {
        if (q < 0.0) throw InvalidPrior("prior '" + p.name + "': negative probability");
        s += q;
      }
      if (std::fabs(s - 1.0) > 1e-9)
        throw InvalidPrior("prior '" + p.name + "': probabilities sum to " + fmt_double(s));
      if (require_nonnegative)
        for (double v : p.values)
          if (v < 0.0) throw InvalidPrior("prior '" + p.name + "': negative outcome");
      break;
    }
  }
}

inline double draw_from_prior(const AttributePrior& p, Rng& rng) {
  switch (p.kind) {
    case AttributePrior::Kind::Point:
      return p.value;
    case AttributePrior::Kind::Uniform:
      return rng.uniform(p.a, p.b);
    case AttributePrior::Kind::TruncNormal: {
      if (p.sigma == 0.0) return std::clamp(p.mu, p.a, p.b);
      const double fa = normal_cdf((p.a - p.mu) / p.sigma);
      const double fb = normal_cdf((p.b - p.mu) / p.sigma);
      if (fb - fa < 1e-14) return std::clamp(p.mu, p.a, p.b);
      const double u = fa + rng.uniform() * (fb - fa);
      return std::clamp(p.mu + p.sigma * normal_quantile(u), p.a, p.b);
    }
    case AttributePrior::Kind::Categorical: {
      double u = rng.uniform();
      for (std::size_t i = 0; i < p.probs.size(); ++i) {
        u -= p.probs[i];
        if (u < 0.0) return p.values[i];
      }
      return p.values.back();
    }
  }
  return 0.0;
}

// Fills theta (baseline demand/emission) and eta (adaptation rate) from priors.
// Both draws happen for every agent regardless of regime so that downstream
// stream positions stay aligned across regime pairs.
inline void draw_behavioral_attributes(SyntheticPopulation& pop, const AttributePrior& theta,
                                       const AttributePrior& eta, std::uint64_t rng_seed) {
  validate_prior(theta, /*require_nonnegative=*/true);
  validate_prior(eta, /*require_nonnegative=*/true);
  Rng rng(rng_seed);
  for (auto& a : pop.agents) {
    a.theta = draw_from_prior(theta, rng);
    a.eta = draw_from_prior(eta, rng);
  }
}

// --- CSV interfaces ---------------------------------------------------------

// Long format: dimension,category,count.  Dimension and category order follow
// first appearance in the file.
inline std::vector<MarginalConstraint> load_marginals_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const int cd = t.require_column("dimension");
  const int cc = t.require_column("category");
  const int cn = t.require_column("count");
  std::vector<MarginalConstraint> out;
  for (const auto& row : t.rows) {
    const std::string& dim = row[cd];
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const MarginalConstraint& m) { return m.dimension == dim; });
    if (it == out.end()) {
      out.push_back({dim, {}, {}});
      it = out.end() - 1;
    }
    it->categories.push_back(row[cc]);
    it->targets.push_back(parse_double(row[cn]));
  }
  if (out.empty()) throw DataError(path.string() + ": no marginal rows");
  return out;
}

// Microdata: one column per constrained dimension (categorical), optional
// `weight` column, all remaining columns continuous (empty cell = missing).
inline SeedSample load_microdata_csv(const std::filesystem::path& path,
                                     const std::vector<std::string>& dimensions) {
  const CsvTable t = read_csv(path);
  SeedSample s;
  std::vector<int> cat_cols, num_cols;
  int weight_col = -1;
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    const std::string& name = t.header[j];
    if (name == "weight") {
      weight_col = static_cast<int>(j);
    } else if (std::find(dimensions.begin(), dimensions.end(), name) != dimensions.end()) {
      cat_cols.push_back(static_cast<int>(j));
      s.cat_columns.push_back(name);
    } else {
      num_cols.push_back(static_cast<int>(j));
      s.num_columns.push_back(name);
    }
  }
  for (const auto& d : dimensions)
    if (std::find(s.cat_columns.begin(), s.cat_columns.end(), d) == s.cat_columns.end())
      throw DataError(path.string() + ": missing dimension column '" + d + "'");
  for (const auto& row : t.rows) {
    std::vector<std::string> cat;
    for (int j : cat_cols) cat.push_back(row[j]);
    std::vector<std::optional<double>> num;
    for (int j : num_cols) {
      if (row[j].empty()) num.push_back(std::nullopt);
      else num.push_back(parse_double(row[j]));
    }
    s.cat_rows.push_back(std::move(cat));
    s.num_rows.push_back(std::move(num));
    s.weights.push_back(weight_col >= 0 ? parse_double(row[weight_col]) : 1.0);
  }
  if (s.size() == 0) throw DataError(path.string() + ": no records");
  return s;
}

inline void write_population_csv(const std::filesystem::path& path,
                                 const SyntheticPopulation& pop) {
  CsvWriter w(path);
  std::vector<std::string> header = {"id", "theta", "eta"};
  for (const auto& c : pop.cat_columns) header.push_back(c);
  for (const auto& c : pop.num_columns) header.push_back(c);
  header.push_back("node");
  w.row(header);
  for (const auto& a : pop.agents) {
    std::vector<std::string> row = {std::to_string(a.id), fmt_double(a.theta),
                                    fmt_double(a.eta)};
    for (const auto& c : a.cat) row.push_back(c);
    for (const auto& v : a.num) row.push_back(v ? fmt_double(*v) : std::string());
    row.push_back(std::to_string(a.node));
    w.row(row);
  }
}

inline SyntheticPopulation read_population_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const int cid = t.require_column("id");
  const int cth = t.require_column("theta");
  const int cet = t.require_column("eta");
  const int cno = t.column("node");
  SyntheticPopulation pop;
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    const int sj = static_cast<int>(j);
    if (sj == cid || sj == cth || sj == cet || sj == cno) continue;
    pop.cat_columns.push_back(t.header[j]);  // typed columns not recoverable; keep as labels
  }
  for (const auto& row : t.rows) {
    Agent a;
    a.id = static_cast<int>(parse_double(row[cid]));
    a.theta = parse_double(row[cth]);
    a.eta = parse_double(row[cet]);
    for (std::size_t j = 0; j < t.header.size(); ++j) {
      const int sj = static_cast<int>(j);
      if (sj == cid || sj == cth || sj == cet || sj == cno) continue;
      a.cat.push_back(row[j]);
    }
    if (cno >= 0 && !row[cno].empty()) a.node = static_cast<int>(parse_double(row[cno]));
    pop.agents.push_back(std::move(a));
  }
  return pop;
}

}  // namespace coadapt
