#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "coadapt/csv.hpp"
#include "coadapt/error.hpp"
#include "coadapt/rng.hpp"
#include "coadapt/stats.hpp"

namespace coadapt {

using Matrix = std::vector<std::vector<double>>;  // row-major, rows = observations

// --- standardization ------------------------------------------------------------

struct StandardizeResult {
  Matrix data;
  std::vector<double> means;
  std::vector<double> sds;
  std::vector<int> constant_columns;  // flagged; mapped to zeros
};

inline StandardizeResult standardize(const Matrix& x) {
  StandardizeResult res;
  if (x.empty()) return res;
  const std::size_t d = x[0].size();
  for (const auto& row : x)
    if (row.size() != d) throw DimensionMismatch("standardize: ragged matrix");
  res.means.assign(d, 0.0);
  res.sds.assign(d, 0.0);
  const double n = static_cast<double>(x.size());
  for (const auto& row : x)
    for (std::size_t j = 0; j < d; ++j) res.means[j] += row[j];
  for (std::size_t j = 0; j < d; ++j) res.means[j] /= n;
  for (const auto& row : x)
    for (std::size_t j = 0; j < d; ++j) {
      const double c = row[j] - res.means[j];
      res.sds[j] += c * c;
    }
  for (std::size_t j = 0; j < d; ++j) {
    res.sds[j] = x.size() > 1 ? std::sqrt(res.sds[j] / (n - 1.0)) : 0.0;
    if (res.sds[j] == 0.0) res.constant_columns.push_back(static_cast<int>(j));
  }
  res.data = x;
  for (auto& row : res.data)
    for (std::size_t j = 0; j < d; ++j)
      row[j] = res.sds[j] > 0.0 ? (row[j] - res.means[j]) / res.sds[j] : 0.0;
  return res;
}

// --- PCA --------------------------------------------------------------------------

struct PcaResult {
  std::vector<double> eigenvalues;        // descending
  Matrix components;                      // [k][d] loadings
  Matrix projected;                       // [n][k]
  std::vector<double> variance_ratio;     // eigenvalue / total
  int retained = 0;
};

namespace detail {

// Cyclic Jacobi eigendecomposition for small symmetric matrices.
inline void jacobi_eigen(Matrix a, std::vector<double>& eigenvalues, Matrix& vectors) {
  const std::size_t d = a.size();
  vectors.assign(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) vectors[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        if (std::fabs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double vkp = vectors[k][p], vkq = vectors[k][q];
          vectors[k][p] = c * vkp - s * vkq;
          vectors[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  eigenvalues.resize(d);
  for (std::size_t i = 0; i < d; ++i) eigenvalues[i] = a[i][i];
}

}  // namespace detail

// Covariance-based PCA.  Components are sorted by eigenvalue (descending) and
// sign-fixed so the largest-magnitude loading is positive.  Retains either a
// fixed count (k > 0) or the smallest count reaching variance_target.
inline PcaResult pca(const Matrix& x, int k = 0, double variance_target = 0.95) {
  if (x.size() < 2) throw InvalidArgument("pca: need at least 2 rows");
  const std::size_t n = x.size(), d = x[0].size();
  for (const auto& row : x)
    if (row.size() != d) throw DimensionMismatch("pca: ragged matrix");
  if (k < 0 || static_cast<std::size_t>(k) > d) throw InvalidArgument("pca: bad k");
  std::vector<double> mu(d, 0.0);
  for (const auto& row : x)
    for (std::size_t j = 0; j < d; ++j) mu[j] += row[j];
  for (auto& v : mu) v /= static_cast<double>(n);
  Matrix cov(d, std::vector<double>(d, 0.0));
  for (const auto& row : x)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) cov[i][j] += (row[i] - mu[i]) * (row[j] - mu[j]);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      cov[i][j] /= static_cast<double>(n - 1);
      cov[j][i] = cov[i][j];
    }

  std::vector<double> evals;
  Matrix evecs;
  detail::jacobi_eigen(cov, evals, evecs);
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return evals[a] > evals[b];
  });

  PcaResult res;
  double total = 0.0;
  for (double e : evals) total += std::max(0.0, e);
  for (std::size_t r = 0; r < d; ++r) {
    const std::size_t c = order[r];
    res.eigenvalues.push_back(std::max(0.0, evals[c]));
    std::vector<double> comp(d);
    for (std::size_t j = 0; j < d; ++j) comp[j] = evecs[j][c];
    std::size_t arg = 0;
    for (std::size_t j = 1; j < d; ++j)
      if (std::fabs(comp[j]) > std::fabs(comp[arg])) arg = j;
    if (comp[arg] < 0.0)
      for (auto& v : comp) v = -v;
    res.components.push_back(std::move(comp));
    res.variance_ratio.push_back(total > 0.0 ? res.eigenvalues.back() / total : 0.0);
  }
  if (k > 0) {
    res.retained = k;
  } else {
    double acc = 0.0;
    res.retained = static_cast<int>(d);
    for (std::size_t r = 0; r < d; ++r) {
      acc += res.variance_ratio[r];
      if (acc >= variance_target) {
        res.retained = static_cast<int>(r) + 1;
        break;
      }
    }
  }
  res.projected.assign(n, std::vector<double>(res.retained, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (int r = 0; r < res.retained; ++r) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += (x[i][j] - mu[j]) * res.components[r][j];
      res.projected[i][r] = s;
    }
  return res;
}

// --- k-means ------------------------------------------------------------------------

struct KMeansResult {
  Matrix centroids;
  std::vector<int> labels;
  double inertia = 0.0;
  int restarts_used = 0;
  std::vector<std::string> warnings;
};

namespace detail {

inline double sqdist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

inline Matrix kmeanspp_seed(const Matrix& x, int k, Rng& rng) {
  Matrix cents;
  cents.push_back(x[rng.below(x.size())]);
  std::vector<double> d2(x.size());
  while (static_cast<int>(cents.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : cents) best = std::min(best, sqdist(x[i], c));
      d2[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      cents.push_back(x[rng.below(x.size())]);
      continue;
    }
    double u = rng.uniform() * total;
    std::size_t pick = x.size() - 1;
    for (std::size_t i = 0; i < x.size(); ++i) {
      u -= d2[i];
      if (u < 0.0) {
        pick = i;
        break;
      }
    }
    cents.push_back(x[pick]);
  }
  return cents;
}

}  // namespace detail

// Lloyd iterations from k-means++ seeds, best of `restarts` by inertia.
// An emptied cluster is reseeded from the point farthest from its centroid.
inline KMeansResult kmeans(const Matrix& x, int k, int restarts, std::uint64_t seed,
                           int max_iter = 300) {
  if (x.empty()) throw InvalidArgument("kmeans: empty data");
  if (k < 1) throw InvalidArgument("kmeans: k must be >= 1");
  if (restarts < 1) throw InvalidArgument("kmeans: restarts must be >= 1");
  const std::size_t n = x.size(), d = x[0].size();
  for (const auto& row : x)
    if (row.size() != d) throw DimensionMismatch("kmeans: ragged matrix");

  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  std::size_t distinct = 1;
  {
    Matrix sorted = x;
    std::sort(sorted.begin(), sorted.end());
    distinct = static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
  }
  if (static_cast<std::size_t>(k) > distinct)
    best.warnings.push_back("k exceeds " + std::to_string(distinct) + " distinct points");
  if (static_cast<std::size_t>(k) > n) throw InvalidArgument("kmeans: k exceeds point count");

  for (int r = 0; r < restarts; ++r) {
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(r)));
    Matrix cents = detail::kmeanspp_seed(x, k, rng);
    std::vector<int> labels(n, 0), prev(n, -1);
    for (int iter = 0; iter < max_iter; ++iter) {
      for (std::size_t i = 0; i < n; ++i) {
        double bd = std::numeric_limits<double>::infinity();
        int bl = 0;
        for (int c = 0; c < k; ++c) {
          const double dd = detail::sqdist(x[i], cents[c]);
          if (dd < bd) {
            bd = dd;
            bl = c;
          }
        }
        labels[i] = bl;
      }
      if (labels == prev) break;
      prev = labels;
      Matrix sums(k, std::vector<double>(d, 0.0));
      std::vector<int> count(k, 0);
      for (std::size_t i = 0; i < n; ++i) {
        ++count[labels[i]];
        for (std::size_t j = 0; j < d; ++j) sums[labels[i]][j] += x[i][j];
      }
      for (int c = 0; c < k; ++c) {
        if (count[c] == 0) {
          // farthest point from its assigned centroid becomes the new seed
          double worst = -1.0;
          std::size_t pick = 0;
          for (std::size_t i = 0; i < n; ++i) {
            const double dd = detail::sqdist(x[i], cents[labels[i]]);
            if (dd > worst) {
              worst = dd;
              pick = i;
            }
          }
          cents[c] = x[pick];
        } else {
          for (std::size_t j = 0; j < d; ++j) cents[c][j] = sums[c][j] / count[c];
        }
      }
    }
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) inertia += detail::sqdist(x[i], cents[labels[i]]);
    if (inertia < best.inertia) {
      best.centroids = cents;
      best.labels = labels;
      best.inertia = inertia;
      best.restarts_used = r + 1;
    }
  }
  return best;
}

// --- diagonal GMM ---------------------------------------------------------------------

struct GmmResult {
  std::vector<double> weights;
  Matrix means;
  Matrix variances;          // diagonal, floored
  Matrix responsibilities;   // [n][k]
  std::vector<int> labels;   // argmax responsibility
  double log_likelihood = 0.0;
  int iterations = 0;
  bool degenerate = false;   // a variance hit the floor
};

// EM for a diagonal-covariance mixture, initialized from k-means.
inline GmmResult gmm_fit(const Matrix& x, int k, std::uint64_t seed, double tol = 1e-8,
                         int max_iter = 500, double var_floor = 1e-8) {
  if (x.empty()) throw InvalidArgument("gmm_fit: empty data");
  if (k < 1) throw InvalidArgument("gmm_fit: k must be >= 1");
  const std::size_t n = x.size(), d = x[0].size();
  if (static_cast<std::size_t>(k) > n) throw InvalidArgument("gmm_fit: k exceeds point count");

  const KMeansResult km = kmeans(x, k, 4, seed);
  GmmResult res;
  res.weights.assign(k, 0.0);
  res.means = km.centroids;
  res.variances.assign(k, std::vector<double>(d, 0.0));
  std::vector<int> count(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++count[km.labels[i]];
    for (std::size_t j = 0; j < d; ++j) {
      const double c = x[i][j] - res.means[km.labels[i]][j];
      res.variances[km.labels[i]][j] += c * c;
    }
  }
  for (int c = 0; c < k; ++c) {
    res.weights[c] = static_cast<double>(std::max(count[c], 1)) / static_cast<double>(n);
    for (std::size_t j = 0; j < d; ++j) {
      res.variances[c][j] = count[c] > 1 ? res.variances[c][j] / count[c] : 1.0;
      if (res.variances[c][j] < var_floor) {
        res.variances[c][j] = var_floor;
        res.degenerate = true;
      }
    }
  }
  {
    double ws = 0.0;
    for (double w : res.weights) ws += w;
    for (auto& w : res.weights) w /= ws;
  }

  res.responsibilities.assign(n, std::vector<double>(k, 0.0));
  const double log2pi = std::log(2.0 * 3.14159265358979323846);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= max_iter; ++iter) {
    // E step in log space
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> logp(k);
      double mx = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        double lp = std::log(res.weights[c]);
        for (std::size_t j = 0; j < d; ++j) {
          const double v = res.variances[c][j];
          const double z = x[i][j] - res.means[c][j];
          lp -= 0.5 * (log2pi + std::log(v) + z * z / v);
        }
        logp[c] = lp;
        mx = std::max(mx, lp);
      }
      double sum = 0.0;
      for (int c = 0; c < k; ++c) sum += std::exp(logp[c] - mx);
      ll += mx + std::log(sum);
      for (int c = 0; c < k; ++c) res.responsibilities[i][c] = std::exp(logp[c] - mx) / sum;
    }
    res.log_likelihood = ll;
    res.iterations = iter;
    // M step
    for (int c = 0; c < k; ++c) {
      double nk = 0.0;
      for (std::size_t i = 0; i < n; ++i) nk += res.responsibilities[i][c];
      nk = std::max(nk, 1e-12);
      res.weights[c] = nk / static_cast<double>(n);
      for (std::size_t j = 0; j < d; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += res.responsibilities[i][c] * x[i][j];
        res.means[c][j] = m / nk;
      }
      for (std::size_t j = 0; j < d; ++j) {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double z = x[i][j] - res.means[c][j];
          v += res.responsibilities[i][c] * z * z;
        }
        v /= nk;
        if (v < var_floor) {
          v = var_floor;
          res.degenerate = true;
        }
        res.variances[c][j] = v;
      }
    }
    if (ll - prev_ll < tol && iter > 1) break;
    prev_ll = ll;
  }
  res.labels.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    int arg = 0;
    for (int c = 1; c < k; ++c)
      if (res.responsibilities[i][c] > res.responsibilities[i][arg]) arg = c;
    res.labels[i] = arg;
  }
  return res;
}

// --- experimental designs ----------------------------------------------------------------

struct DesignParameter {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
};

// Full factorial over evenly spaced levels (endpoints included).
inline Matrix grid_design(const std::vector<DesignParameter>& space, int levels,
                          double cap = 1e5) {
  if (levels < 1) throw InvalidArgument("grid_design: levels must be >= 1");
  if (space.empty()) throw InvalidArgument("grid_design: empty space");
  double npoints = 1.0;
  for (std::size_t i = 0; i < space.size(); ++i) npoints *= levels;
  if (npoints > cap)
    throw TooManyPoints("grid_design: " + fmt_double(npoints) + " points exceeds cap " +
                        fmt_double(cap));
  const std::size_t d = space.size();
  Matrix pts;
  std::vector<int> idx(d, 0);
  for (;;) {
    std::vector<double> p(d);
    for (std::size_t j = 0; j < d; ++j) {
      const double f = levels == 1 ? 0.5
                                   : static_cast<double>(idx[j]) / static_cast<double>(levels - 1);
      p[j] = space[j].lower + f * (space[j].upper - space[j].lower);
    }
    pts.push_back(std::move(p));
    std::size_t j = 0;
    for (; j < d; ++j) {
      if (++idx[j] < levels) break;
      idx[j] = 0;
    }
    if (j == d) break;
  }
  return pts;
}

// Latin hypercube: stratified jittered sample, one stratum per point and
// dimension, independently permuted per dimension.
inline Matrix lhs_design(const std::vector<DesignParameter>& space, int n,
                         std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("lhs_design: n must be >= 1");
  if (space.empty()) throw InvalidArgument("lhs_design: empty space");
  const std::size_t d = space.size();
  Rng rng(seed);
  Matrix pts(n, std::vector<double>(d, 0.0));
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i)
      std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    for (int i = 0; i < n; ++i) {
      const double u = (static_cast<double>(perm[i]) + rng.uniform()) / static_cast<double>(n);
      pts[i][j] = space[j].lower + u * (space[j].upper - space[j].lower);
    }
  }
  return pts;
}

// --- Morris elementary-effects screening ----------------------------------------------

struct MorrisRow {
  std::string param;
  double mu = 0.0;
  double mu_star = 0.0;
  double sigma = 0.0;
};

struct MorrisResult {
  std::vector<MorrisRow> rows;
  int trajectories = 0;
  int evaluations = 0;
};

// r one-at-a-time trajectories on a p-level unit grid, delta = p / (2(p-1)).
// Effects are computed on the unit scale; the evaluator receives physical
// coordinates.
inline MorrisResult morris_screen(
    const std::function<double(const std::vector<double>&)>& evaluate,
    const std::vector<DesignParameter>& space, int r, int p, std::uint64_t seed) {
  if (r < 2) throw InvalidArgument("morris_screen: need r >= 2 trajectories");
  if (p < 2 || p % 2 != 0) throw InvalidArgument("morris_screen: p must be even and >= 2");
  if (space.empty()) throw InvalidArgument("morris_screen: empty space");
  const std::size_t d = space.size();
  const double delta = static_cast<double>(p) / (2.0 * (p - 1));
  const int base_levels = p / 2;  // indices 0..p/2-1 keep x + delta on the grid

  Rng rng(seed);
  std::vector<std::vector<double>> effects(d);
  MorrisResult res;
  res.trajectories = r;

  auto physical = [&](const std::vector<double>& u) {
    std::vector<double> x(d);
    for (std::size_t j = 0; j < d; ++j)
      x[j] = space[j].lower + u[j] * (space[j].upper - space[j].lower);
    return x;
  };

  for (int traj = 0; traj < r; ++traj) {
    std::vector<double> u(d);
    for (std::size_t j = 0; j < d; ++j)
      u[j] = static_cast<double>(rng.below(base_levels)) / static_cast<double>(p - 1);
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = d; i > 1; --i)
      std::swap(order[i - 1], order[rng.below(i)]);
    double j_prev = evaluate(physical(u));
    ++res.evaluations;
    for (std::size_t step = 0; step < d; ++step) {
      const std::size_t j = order[step];
      u[j] += delta;
      const double j_next = evaluate(physical(u));
      ++res.evaluations;
      effects[j].push_back((j_next - j_prev) / delta);
      j_prev = j_next;
    }
  }

  for (std::size_t j = 0; j < d; ++j) {
    MorrisRow row;
    row.param = space[j].name;
    const auto& e = effects[j];
    row.mu = mean(e);
    double ms = 0.0;
    for (double v : e) ms += std::fabs(v);
    row.mu_star = ms / static_cast<double>(e.size());
    row.sigma = sample_sd(e);
    res.rows.push_back(std::move(row));
  }
  return res;
}

// --- cluster quality and reporting ------------------------------------------------------

inline double silhouette_score(const Matrix& x, const std::vector<int>& labels, int k) {
  const std::size_t n = x.size();
  if (n != labels.size()) throw DimensionMismatch("silhouette: label count mismatch");
  std::vector<int> count(k, 0);
  for (int l : labels) {
    if (l < 0 || l >= k) throw InvalidArgument("silhouette: label out of range");
    ++count[l];
  }
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (count[labels[i]] <= 1) continue;
    std::vector<double> dist_sum(k, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      dist_sum[labels[j]] += std::sqrt(detail::sqdist(x[i], x[j]));
    }
    const double a = dist_sum[labels[i]] / (count[labels[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == labels[i] || count[c] == 0) continue;
      b = std::min(b, dist_sum[c] / count[c]);
    }
    if (!std::isfinite(b)) continue;
    total += (b - a) / std::max(a, b);
    ++used;
  }
  return used > 0 ? total / static_cast<double>(used) : 0.0;
}

// Adjusted Rand index between two labelings.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw DimensionMismatch("ari: size mismatch");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  std::map<std::pair<int, int>, double> cont;
  std::map<int, double> ra, rb;
  for (std::size_t i = 0; i < n; ++i) {
    cont[{a[i], b[i]}] += 1.0;
    ra[a[i]] += 1.0;
    rb[b[i]] += 1.0;
  }
  auto choose2 = [](double m) { return m * (m - 1.0) / 2.0; };
  double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& kv : cont) sum_ij += choose2(kv.second);
  for (const auto& kv : ra) sum_a += choose2(kv.second);
  for (const auto& kv : rb) sum_b += choose2(kv.second);
  const double total = choose2(static_cast<double>(n));
  const double expected = sum_a * sum_b / total;
  const double maximum = 0.5 * (sum_a + sum_b);
  if (maximum == expected) return 1.0;
  return (sum_ij - expected) / (maximum - expected);
}

// One simulated run reduced to the feature vector used for clustering.
struct RunFeatures {
  std::string run_id;
  double mean_aggregate = 0.0;
  double overload_freq = 0.0;
  double h_mu = 0.0;
  double c_mu = 0.0;
  double e_pred = 0.0;
  std::string regime;
  std::string label;  // trajectory classification, or external ground truth
};

inline Matrix feature_matrix(const std::vector<RunFeatures>& f) {
  Matrix x;
  x.reserve(f.size());
  for (const auto& r : f)
    x.push_back({r.mean_aggregate, r.overload_freq, r.h_mu, r.c_mu, r.e_pred});
  return x;
}

struct ClusterSummary {
  int cluster = 0;
  int size = 0;
  std::vector<double> feature_means;  // raw feature space
  std::vector<std::string> suggested_names;
};

struct ClusterReport {
  std::vector<ClusterSummary> clusters;
  std::map<int, double> silhouette_by_k;
  double ari_vs_labels = std::numeric_limits<double>::quiet_NaN();
};

// Names follow the dynamics each cluster exhibits: lowest combined rank of
// overload and entropy -> stable; highest overload -> overloaded; highest
// statistical complexity -> near-critical; highest cyclic share -> oscillatory.
inline ClusterReport cluster_report(const std::vector<RunFeatures>& feats,
                                    const std::vector<int>& labels, int k,
                                    const Matrix& standardized) {
  if (feats.size() != labels.size())
    throw DimensionMismatch("cluster_report: label count mismatch");
  ClusterReport rep;
  const Matrix raw = feature_matrix(feats);
  const std::size_t d = raw.empty() ? 0 : raw[0].size();
  std::vector<ClusterSummary> cs(k);
  std::vector<double> cyclic_share(k, 0.0);
  for (int c = 0; c < k; ++c) {
    cs[c].cluster = c;
    cs[c].feature_means.assign(d, 0.0);
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto& c = cs[labels[i]];
    ++c.size;
    for (std::size_t j = 0; j < d; ++j) c.feature_means[j] += raw[i][j];
    if (feats[i].label == "cyclic") cyclic_share[labels[i]] += 1.0;
  }
  for (int c = 0; c < k; ++c) {
    if (cs[c].size > 0) {
      for (auto& v : cs[c].feature_means) v /= cs[c].size;
      cyclic_share[c] /= cs[c].size;
    }
  }
  // feature indices: 0 mean_aggregate, 1 overload_freq, 2 h_mu, 3 c_mu, 4 e_pred
  auto argmax = [&](auto&& get) {
    int arg = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (cs[c].size == 0) continue;
      const double v = get(c);
      if (v > best) {
        best = v;
        arg = c;
      }
    }
    return arg;
  };
  const int stable = argmax([&](int c) {
    return -(cs[c].feature_means[1] + cs[c].feature_means[2]);
  });
  const int overloaded = argmax([&](int c) { return cs[c].feature_means[1]; });
  const int near_critical = argmax([&](int c) { return cs[c].feature_means[3]; });
  const int oscillatory = argmax([&](int c) { return cyclic_share[c]; });
  if (stable >= 0) cs[stable].suggested_names.push_back("stable");
  if (overloaded >= 0) cs[overloaded].suggested_names.push_back("overloaded");
  if (near_critical >= 0) cs[near_critical].suggested_names.push_back("near-critical");
  if (oscillatory >= 0 && cyclic_share[oscillatory] > 0.0)
    cs[oscillatory].suggested_names.push_back("oscillatory");
  rep.clusters = std::move(cs);

  // silhouette across candidate k (fresh k-means per k on the standardized data)
  for (int kk = 2; kk <= 6 && static_cast<std::size_t>(kk) <= standardized.size(); ++kk) {
    const KMeansResult km = kmeans(standardized, kk, 4, 1234567);
    rep.silhouette_by_k[kk] = silhouette_score(standardized, km.labels, kk);
  }
  return rep;
}

}  // namespace coadapt
