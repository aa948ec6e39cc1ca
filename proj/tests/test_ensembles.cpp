#include <doctest.h>

#include <cmath>

#include "ydsim/ensembles.hpp"
#include "ydsim/oracle.hpp"
#include "ydsim/pde.hpp"
#include "ydsim/rng.hpp"

using namespace ydsim;

TEST_SUITE_BEGIN("ensembles");

TEST_CASE("log weight") {
  const EnsembleParams u(0.5, Statistics::U);
  CHECK(log_weight(Partition{}, u) == 0.0);
  CHECK(log_weight(Partition::from_parts({2, 1}), u) ==
        doctest::Approx(3.0 * std::log(0.5)).epsilon(1e-15));
  const EnsembleParams r(0.9, Statistics::RU);
  CHECK(log_weight(StrictPartition::from_parts({3}), r) ==
        doctest::Approx(3.0 * std::log(0.9)).epsilon(1e-15));
  CHECK_THROWS_AS(log_weight(Partition{}, r), std::invalid_argument);
  CHECK_THROWS_AS(EnsembleParams(1.0, Statistics::U), std::invalid_argument);
  CHECK_THROWS_AS(EnsembleParams(0.0, Statistics::U), std::invalid_argument);
}

TEST_CASE("log partition function against the counting oracle") {
  SeriesControl ctl;
  for (const Statistics stat : {Statistics::U, Statistics::RU}) {
    const double eps = 0.5;
    // independent route: sum_n c(n) eps^n with exact counts, truncated when
    // the term drops below 1e-15
    double z = 0.0;
    for (std::int64_t n = 0; n <= 200; ++n) {
      const double c = static_cast<double>(stat == Statistics::U
                                               ? oracle::count_partitions(n)
                                               : oracle::count_distinct_partitions(n));
      const double term = c * std::pow(eps, static_cast<double>(n));
      z += term;
      if (n > 10 && term < 1e-15) break;
    }
    const double got = log_partition_function(EnsembleParams(eps, stat), ctl);
    CHECK(got == doctest::Approx(std::log(z)).epsilon(1e-12));
  }
  // eps -> 0 limit: empty product
  CHECK(log_partition_function(EnsembleParams(1e-9, Statistics::U), ctl) ==
        doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("series control failure paths") {
  SeriesControl tight;
  tight.max_terms = 2;
  CHECK_THROWS_AS(log_partition_function(EnsembleParams(0.9, Statistics::U), tight),
                  NumericalError);
  CHECK_THROWS_AS(mean_area(EnsembleParams(0.9, Statistics::U), tight), NumericalError);
  SeriesControl bad;
  bad.abs_tol = -1.0;
  CHECK_THROWS_AS(mean_area(EnsembleParams(0.5, Statistics::U), bad), std::invalid_argument);
}

TEST_CASE("mean area values at eps = 1/2") {
  SeriesControl ctl;
  const double mu_u = mean_area(EnsembleParams(0.5, Statistics::U), ctl);
  const double mu_r = mean_area(EnsembleParams(0.5, Statistics::RU), ctl);
  CHECK(mu_u == doctest::Approx(2.744).epsilon(1e-3));
  CHECK(mu_r == doctest::Approx(1.670).epsilon(1e-3));
  CHECK(mu_u ==
        doctest::Approx(oracle::exact_mean_area_truncated(0.5, 120, Statistics::U)).epsilon(1e-9));
  CHECK(mu_r ==
        doctest::Approx(oracle::exact_mean_area_truncated(0.5, 120, Statistics::RU))
            .epsilon(1e-9));
  // leading behavior at small eps
  CHECK(mean_area(EnsembleParams(1e-6, Statistics::U), ctl) ==
        doctest::Approx(1e-6).epsilon(1e-5));
}

TEST_CASE("mean area is strictly increasing on a grid") {
  SeriesControl ctl;
  for (const Statistics stat : {Statistics::U, Statistics::RU}) {
    double prev = 0.0;
    for (double eps = 0.05; eps < 0.96; eps += 0.05) {
      const double cur = mean_area(EnsembleParams(eps, stat), ctl);
      CHECK(cur > prev);
      prev = cur;
    }
  }
}

TEST_CASE("solve_epsilon postcondition and asymptotics") {
  SeriesControl ctl;
  SUBCASE("N = 1 residual") {
    for (const Statistics stat : {Statistics::U, Statistics::RU}) {
      const double eps = solve_epsilon(1, stat, ctl);
      CHECK(std::abs(mean_area(EnsembleParams(eps, stat), ctl) - 1.0) <= 1e-10);
    }
  }
  SUBCASE("N = 100 approaches the drift constants") {
    const double eps_u = solve_epsilon(100, Statistics::U, ctl);
    CHECK(std::abs(100.0 * (1.0 - eps_u) - ModelConstants::alpha()) <= 0.1);
    const double eps_r = solve_epsilon(100, Statistics::RU, ctl);
    CHECK(std::abs(100.0 * (1.0 - eps_r) - ModelConstants::beta()) <= 0.1);
  }
}

TEST_CASE("sampler matches the series and the normalizing constant") {
  SeriesControl ctl;
  const int n_draws = 100000;
  for (double eps : {0.3, 0.5, 0.7}) {
    const EnsembleParams params(eps, Statistics::U);
    Xoshiro256ss rng(1234);
    double sum = 0.0, sumsq = 0.0;
    int empties = 0;
    for (int i = 0; i < n_draws; ++i) {
      const Partition p = sample_partition(params, rng);
      const double n = static_cast<double>(p.area());
      sum += n;
      sumsq += n * n;
      empties += p.empty() ? 1 : 0;
    }
    const double mean = sum / n_draws;
    const double sd = std::sqrt((sumsq / n_draws - mean * mean) / (n_draws - 1));
    const double expected = mean_area(params, ctl);
    CHECK(std::abs(mean - expected) <= 3.0 * sd);

    // P(empty) = 1/Z within 3 binomial standard errors
    const double p_empty = std::exp(-log_partition_function(params, ctl));
    const double freq = static_cast<double>(empties) / n_draws;
    const double se = std::sqrt(p_empty * (1.0 - p_empty) / n_draws);
    CHECK(std::abs(freq - p_empty) <= 3.0 * se);
  }
}

TEST_CASE("strict sampler matches the alternating series") {
  SeriesControl ctl;
  const int n_draws = 100000;
  for (double eps : {0.3, 0.5, 0.7}) {
    const EnsembleParams params(eps, Statistics::RU);
    Xoshiro256ss rng(4321);
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n_draws; ++i) {
      const double n = static_cast<double>(sample_strict_partition(params, rng).area());
      sum += n;
      sumsq += n * n;
    }
    const double mean = sum / n_draws;
    const double sd = std::sqrt((sumsq / n_draws - mean * mean) / (n_draws - 1));
    CHECK(std::abs(mean - mean_area(params, ctl)) <= 3.0 * sd);
  }
}

TEST_CASE("euler product cross-check at eps = 0.3") {
  // product form of the normalizing constant against the counting series
  const double eps = 0.3;
  double log_prod = 0.0;
  for (int k = 1; k <= 120; ++k) log_prod -= std::log1p(-std::pow(eps, k));
  double z = 0.0;
  for (std::int64_t n = 0; n <= 120; ++n)
    z += static_cast<double>(oracle::count_partitions(n)) * std::pow(eps, double(n));
  CHECK(log_prod == doctest::Approx(std::log(z)).epsilon(1e-12));
}

TEST_SUITE_END();
