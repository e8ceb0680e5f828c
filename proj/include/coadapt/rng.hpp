#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace coadapt {

// splitmix64 finalizer; used both as a bit mixer and for deriving stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a child seed from (master, key). Chaining calls gives independent
// streams per (replication, purpose) without correlated low bits.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t key) {
  return mix64(master ^ mix64(key + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return split_seed(split_seed(master, a), b);
}

// Stream ids for the engine; replication r uses split_seed(master, r, STREAM_*).
enum : std::uint64_t {
  kStreamPopulation = 0x10,
  kStreamAssignment = 0x20,
  kStreamShocks = 0x30,
};

// mt19937_64 with hand-rolled distributions.  The engine is pinned by the
// standard; std distributions are not, and reproducibility across library
// versions matters more here than sampling speed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // unbiased integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % n;
  }

  // Box-Muller without caching: deterministic draw count (2 u64 per call).
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double normal(double mu, double sigma) { return mu + sigma * normal(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace coadapt
