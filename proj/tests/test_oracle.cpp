#include <doctest.h>

#include <cmath>
#include <map>

#include "ydsim/oracle.hpp"

using namespace ydsim;
using namespace ydsim::oracle;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("partition counts") {
  CHECK(count_partitions(0) == 1);
  CHECK(count_partitions(1) == 1);
  CHECK(count_partitions(5) == 7);
  CHECK(count_partitions(10) == 42);
  CHECK(count_partitions(100) == 190569292);
  CHECK(count_distinct_partitions(0) == 1);
  CHECK(count_distinct_partitions(5) == 3);
  CHECK(count_distinct_partitions(10) == 10);
  CHECK_THROWS_AS(count_partitions(-1), std::invalid_argument);
}

TEST_CASE("state enumeration is complete and duplicate free") {
  const auto states_u = enumerate_partitions(2);
  CHECK(states_u.size() == 4);  // {}, (1), (2), (1,1)

  const auto states_r = enumerate_strict_partitions(3);
  CHECK(states_r.size() == 5);  // {}, (1), (2), (3), (2,1)

  CHECK(enumerate_partitions(0).size() == 1);

  // cardinality = sum of counts; duplicates impossible if sizes match
  std::int64_t expected = 0;
  for (std::int64_t n = 0; n <= 8; ++n) expected += count_partitions(n);
  CHECK(static_cast<std::int64_t>(enumerate_partitions(8).size()) == expected);
  CHECK(expected == 67);

  CHECK_THROWS_AS(enumerate_partitions(41), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_strict_partitions(61), std::invalid_argument);
}

TEST_CASE("smallest truncated chains") {
  for (const Statistics stat : {Statistics::U, Statistics::RU}) {
    const auto chain = build_truncated_chain(stat, 1, 0.4);
    REQUIRE(chain.size() == 2);
    REQUIRE(chain.transitions.size() == 2);
    std::map<std::pair<std::size_t, std::size_t>, double> rates;
    for (const auto& t : chain.transitions) rates[{t.from, t.to}] = t.rate;
    // states sorted: {} first, then (1)
    CHECK(rates.at({0, 1}) == 0.4);
    CHECK(rates.at({1, 0}) == 1.0);
  }
}

TEST_CASE("two-state stationary distribution in closed form") {
  const double eps = 0.3;
  const auto chain = build_truncated_chain(Statistics::U, 1, eps);
  const auto pi = stationary_distribution(chain);
  CHECK(pi[0] == doctest::Approx(1.0 / (1.0 + eps)).epsilon(1e-12));
  CHECK(pi[1] == doctest::Approx(eps / (1.0 + eps)).epsilon(1e-12));
}

TEST_CASE("stationary distribution matches normalized weights at cap 8") {
  for (const Statistics stat : {Statistics::U, Statistics::RU}) {
    for (double eps : {0.25, 0.5, 0.75}) {
      const auto chain = build_truncated_chain(stat, 8, eps);
      const auto pi = stationary_distribution(chain);
      double z = 0.0;
      for (auto area : chain.state_area) z += std::pow(eps, static_cast<double>(area));
      for (std::size_t s = 0; s < chain.size(); ++s) {
        const double expected = std::pow(eps, static_cast<double>(chain.state_area[s])) / z;
        CHECK(std::abs(pi[s] - expected) / expected <= 1e-10);
      }
    }
  }
}

TEST_CASE("detailed balance holds exactly in rational arithmetic") {
  for (const Statistics stat : {Statistics::U, Statistics::RU}) {
    CHECK(detailed_balance_exact(build_truncated_chain(stat, 8, 0.25), 1, 4));
    CHECK(detailed_balance_exact(build_truncated_chain(stat, 8, 0.5), 1, 2));
    CHECK(detailed_balance_exact(build_truncated_chain(stat, 8, 0.75), 3, 4));
  }
}

TEST_CASE("rational arithmetic") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(3, 4) * Rational(4, 3) == Rational(1, 1));
  CHECK(rational_pow(Rational(3, 4), 9) == Rational(19683, 262144));
  CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
  CHECK(Rational(-1, -2) == Rational(1, 2));
  CHECK(Rational(1, -2) == Rational(-1, 2));
}

TEST_CASE("exact truncated mean area") {
  CHECK(exact_mean_area_truncated(0.01, 80, Statistics::U) ==
        doctest::Approx(0.01).epsilon(0.05));
  CHECK_THROWS_AS(exact_mean_area_truncated(0.75, 120, Statistics::U),
                  std::invalid_argument);
  // truncation-adequacy check: p(M) eps^M must be < 1e-15
  CHECK_THROWS_AS(exact_mean_area_truncated(0.7, 20, Statistics::U), NumericalError);
}

TEST_CASE("generator intertwining for all small states") {
  const double eps = 0.65;
  for (const auto& p : enumerate_partitions(6)) CHECK(moves_intertwine_u(p, eps));
  for (const auto& q : enumerate_strict_partitions(6)) CHECK(moves_intertwine_r(q, eps));
}

TEST_CASE("row sums of the truncated generator vanish") {
  const auto chain = build_truncated_chain(Statistics::U, 6, 0.5);
  for (double s : generator_row_sums(chain)) CHECK(s == 0.0);
}

TEST_SUITE_END();
