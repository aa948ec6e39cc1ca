#pragma once

#include <cstdint>
#include <stdexcept>

#include "ydsim/diagrams.hpp"
#include "ydsim/rng.hpp"

namespace ydsim {

enum class Statistics { U, RU };

const char* statistics_name(Statistics s);
Statistics statistics_from_name(const std::string& name);

// Failure of a numerical routine (series truncation, bracketing, solver
// residual). Mapped to a dedicated process exit code by the CLI.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EnsembleParams {
  double epsilon;
  Statistics statistics;

  EnsembleParams(double eps, Statistics stat) : epsilon(eps), statistics(stat) {
    if (!(eps > 0.0 && eps < 1.0))
      throw std::invalid_argument("ensemble parameter must satisfy 0 < epsilon < 1");
  }
};

// Truncation control for the infinite sums below.
struct SeriesControl {
  double abs_tol = 1e-13;
  std::int64_t max_terms = 50'000'000;

  void validate() const {
    if (!(abs_tol > 0.0)) throw std::invalid_argument("abs_tol must be > 0");
    if (max_terms < 1) throw std::invalid_argument("max_terms must be >= 1");
  }
};

// Unnormalized log probability: area(state) * log(epsilon).
double log_weight(const Partition& p, const EnsembleParams& params);
double log_weight(const StrictPartition& q, const EnsembleParams& params);

// U:  -sum_k log(1 - eps^k);  RU:  sum_k log(1 + eps^k).
double log_partition_function(const EnsembleParams& params, const SeriesControl& ctl);

// Expected area under the grandcanonical measure:
// U:  sum_m eps^m / (1 - eps^m)^2
// RU: sum_m (-1)^(m-1) eps^m / (1 - eps^m)^2
double mean_area(const EnsembleParams& params, const SeriesControl& ctl);

// The epsilon in (0,1) with mean_area(epsilon) = N^2, by bisection.
// Postcondition: |mean_area(eps) - N^2| <= 1e-10 * N^2.
// For RU statistics the monotonicity of mean_area is verified numerically
// on the bracket before bisecting.
double solve_epsilon(std::int64_t n_scale, Statistics statistics, const SeriesControl& ctl);

// Exact samplers, by independent per-part-value factorization:
// U: multiplicity of part k is geometric, P(m_k = j) = (1 - eps^k) eps^(kj);
// RU: part k is included with probability eps^k / (1 + eps^k).
// Part values are enumerated until the probability of any further nonzero
// draw is below 1e-12; one uniform variate is consumed per candidate value.
Partition sample_partition(const EnsembleParams& params, UnitSource& rng);
StrictPartition sample_strict_partition(const EnsembleParams& params, UnitSource& rng);

}  // namespace ydsim
