#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "coadapt/stats.hpp"

using namespace coadapt;

TEST_CASE("mean and unbiased variance") {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  CHECK(mean(v) == 2.5);
  CHECK(sample_variance(v) == Catch::Approx(5.0 / 3.0).epsilon(1e-14));
  CHECK(sample_sd(v) == Catch::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-14));
  CHECK(sample_variance(std::vector<double>{7.0}) == 0.0);
  CHECK(sample_variance(std::vector<double>{}) == 0.0);
}

TEST_CASE("least-squares slope is exact on a line") {
  std::vector<double> v(20);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 3.0 + 2.0 * static_cast<double>(i);
  CHECK(ls_slope(v) == Catch::Approx(2.0).margin(1e-12));
  const std::vector<double> flat = {5.0, 5.0, 5.0};
  CHECK(ls_slope(flat) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("normal cdf matches reference points") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.96) == Catch::Approx(0.9750021048517795).epsilon(1e-12));
  CHECK(normal_cdf(-1.0) == Catch::Approx(0.15865525393145707).epsilon(1e-12));
  for (double x : {-3.0, -0.7, 0.2, 1.5, 2.9})
    CHECK(normal_cdf(-x) == Catch::Approx(1.0 - normal_cdf(x)).margin(1e-14));
}

TEST_CASE("normal quantile inverts the cdf") {
  CHECK(normal_quantile(0.5) == Catch::Approx(0.0).margin(1e-12));
  CHECK(normal_quantile(0.975) == Catch::Approx(1.959963984540054).epsilon(1e-10));
  for (double x = -4.0; x <= 4.0; x += 0.25)
    CHECK(normal_quantile(normal_cdf(x)) == Catch::Approx(x).margin(1e-9));
}

// For df = 2 the survival function has the closed form exp(-x/2); for df = 1
// it is erfc(sqrt(x/2)).  Both serve as independent oracles for the
// regularized-gamma implementation.
TEST_CASE("chi-squared survival function matches closed forms") {
  CHECK(chi2_sf(3.0, 2) == Catch::Approx(std::exp(-1.5)).epsilon(1e-10));
  CHECK(chi2_sf(0.0, 2) == Catch::Approx(1.0).margin(1e-14));
  CHECK(chi2_sf(10.0, 2) == Catch::Approx(std::exp(-5.0)).epsilon(1e-10));
  for (double x : {0.5, 1.0, 3.841458820694124, 6.634896601021213})
    CHECK(chi2_sf(x, 1) == Catch::Approx(std::erfc(std::sqrt(x / 2.0))).epsilon(1e-10));
  CHECK(chi2_sf(3.841458820694124, 1) == Catch::Approx(0.05).epsilon(1e-8));
  // monotone decreasing in the statistic, increasing in df
  CHECK(chi2_sf(5.0, 3) > chi2_sf(6.0, 3));
  CHECK(chi2_sf(5.0, 4) > chi2_sf(5.0, 3));
}

TEST_CASE("entropy in bits") {
  const std::vector<double> uniform4 = {5.0, 5.0, 5.0, 5.0};
  CHECK(entropy_bits(uniform4) == Catch::Approx(2.0).margin(1e-14));
  const std::vector<double> point = {9.0, 0.0, 0.0};
  CHECK(entropy_bits(point) == 0.0);
  const std::vector<double> skew = {3.0, 1.0};
  CHECK(entropy_bits(skew) == Catch::Approx(0.8112781244591328).epsilon(1e-14));
  CHECK(entropy_bits(std::vector<double>{}) == 0.0);
}
