#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "doctest.h"
#include "test_support.hpp"
#include "tssynth/core.hpp"

using namespace tssynth;
using tssynth::testing::gaussian_values;

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double pop_sd(const std::vector<double>& v) {
  const double mu = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace

TEST_CASE("TimeSeries rejects short or non-finite input") {
  CHECK_THROWS_AS(TimeSeries({1.0}), InvalidInput);
  CHECK_THROWS_AS(TimeSeries({1.0, std::nan("")}), InvalidInput);
  CHECK_THROWS_AS(TimeSeries({1.0, std::numeric_limits<double>::infinity()}), InvalidInput);
  const TimeSeries s({1, 2, 3, 4});
  CHECK(s.size() == 4);
  CHECK(s.window_count(3) == 2);
  CHECK(s.window(1, 3)[0] == 2.0);
  CHECK_THROWS_AS(s.window(2, 3), InvalidInput);
}

TEST_CASE("WindowConfig validation") {
  CHECK(default_exclusion_radius(4) == 1);
  CHECK(default_exclusion_radius(50) == 13);
  CHECK(default_exclusion_radius(100) == 25);
  CHECK_NOTHROW(WindowConfig::with_default_exclusion(10).validate(100));
  CHECK_THROWS_AS((WindowConfig{2, 0}).validate(100), InvalidInput);
  CHECK_THROWS_AS((WindowConfig{101, 0}).validate(100), InvalidInput);
  CHECK_THROWS_AS((WindowConfig{10, 91}).validate(100), InvalidInput);
  CHECK_THROWS_AS((WindowConfig{10, 1, 0.0}).validate(100), InvalidInput);
}

TEST_CASE("z_normalize") {
  SUBCASE("hand-computed example") {
    const std::vector<double> x{1, 2, 3};
    const auto z = z_normalize(x);
    const double s = std::sqrt(1.5);
    CHECK(z[0] == doctest::Approx(-s).epsilon(1e-15));
    CHECK(z[1] == doctest::Approx(0.0));
    CHECK(z[2] == doctest::Approx(s).epsilon(1e-15));
    CHECK(std::abs(mean_of(z)) < 1e-15);
    CHECK(pop_sd(z) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("flat input maps to zeros") {
    const std::vector<double> x{5, 5, 5};
    for (double v : z_normalize(x)) CHECK(v == 0.0);
  }
  SUBCASE("idempotent") {
    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 50; ++rep) {
      const auto x = gaussian_values(rng, 3 + static_cast<std::size_t>(rep));
      const auto once = z_normalize(x);
      const auto twice = z_normalize(once);
      for (std::size_t t = 0; t < x.size(); ++t) {
        CHECK(twice[t] == doctest::Approx(once[t]).epsilon(1e-12));
      }
    }
  }
  SUBCASE("overflowing variance is not mistaken for a flat window") {
    const std::vector<double> huge{-1e306, 1e306, 0.0};
    for (double v : z_normalize(huge)) CHECK(std::isnan(v));
  }
  SUBCASE("errors") {
    const std::vector<double> bad{1, std::nan(""), 2};
    CHECK_THROWS_AS(z_normalize(bad), InvalidInput);
    const std::vector<double> tiny{1, 2};
    CHECK_THROWS_AS(z_normalize(tiny), InvalidInput);
  }
}

TEST_CASE("pearson_corr examples") {
  const std::vector<double> x{1, 2, 3};
  CHECK(pearson_corr(x, std::vector<double>{1, 2, 3}) == doctest::Approx(1.0));
  CHECK(pearson_corr(x, std::vector<double>{6, 4, 2}) == doctest::Approx(-1.0));
  CHECK(pearson_corr(x, std::vector<double>{7, 7, 7}) == 0.0);
  CHECK_THROWS_AS(pearson_corr(x, std::vector<double>{1, 2, 3, 4}), InvalidInput);
}

TEST_CASE("znorm_dist examples") {
  std::mt19937_64 rng(2);
  const auto x = gaussian_values(rng, 40);
  std::vector<double> affine(x.size()), neg(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    affine[t] = 3.5 * x[t] - 12.0;
    neg[t] = -x[t];
  }
  CHECK(znorm_dist(x, affine) < 1e-12);
  CHECK(znorm_dist(x, neg) == doctest::Approx(2.0 * std::sqrt(40.0)).epsilon(1e-14));
  CHECK_THROWS_AS(znorm_dist(x, std::vector<double>(39, 0.0)), InvalidInput);

  SUBCASE("flat conventions") {
    const std::vector<double> flat(40, 2.0);
    CHECK(znorm_dist(flat, flat) == 0.0);
    CHECK(znorm_dist(x, flat) == doctest::Approx(std::sqrt(40.0)).epsilon(1e-14));
  }
}

TEST_CASE("znorm_dist matches brute-force normalize-then-Euclid") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const auto x = gaussian_values(rng, 50, 3.0);
    const auto y = gaussian_values(rng, 50, 0.2);
    CHECK(std::abs(znorm_dist(x, y) - tssynth::testing::oracle_dist(x, y)) < 1e-12);
  }
}

TEST_CASE("distance properties on random pairs") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> len(3, 128);
  std::uniform_real_distribution<double> scale(0.01, 100.0), shift(-1e3, 1e3);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t m = len(rng);
    const auto x = gaussian_values(rng, m);
    const auto y = gaussian_values(rng, m);
    const double r = pearson_corr(x, y);
    const double d = znorm_dist(x, y);
    const double md = static_cast<double>(m);

    CHECK(std::abs(d * d - 2.0 * md * (1.0 - r)) < 1e-9);
    CHECK(r >= -1.0 - 1e-12);
    CHECK(r <= 1.0 + 1e-12);
    CHECK(std::abs(znorm_dist(y, x) - d) <= 1e-12);

    const double a = scale(rng), b = shift(rng), c = scale(rng), e = shift(rng);
    std::vector<double> xa(m), yc(m);
    for (std::size_t t = 0; t < m; ++t) {
      xa[t] = a * x[t] + b;
      yc[t] = c * y[t] + e;
    }
    CHECK(std::abs(znorm_dist(xa, yc) - d) < 1e-9);
  }
}
