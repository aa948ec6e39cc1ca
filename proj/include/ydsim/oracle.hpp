#pragma once

#include <cstdint>
#include <vector>

#include "ydsim/diagrams.hpp"
#include "ydsim/ensembles.hpp"

namespace ydsim::oracle {

// Exact partition counts p(n) and p_neq(n) via the bounded-part dynamic
// program; additions are overflow-checked against the 64-bit range.
std::int64_t count_partitions(std::int64_t n);
std::int64_t count_distinct_partitions(std::int64_t n);

// Complete duplicate-free enumeration of all states with area <= cap.
// The default hard limits keep state counts at desk scale.
std::vector<Partition> enumerate_partitions(std::int64_t cap, std::int64_t hard_limit = 40);
std::vector<StrictPartition> enumerate_strict_partitions(std::int64_t cap,
                                                         std::int64_t hard_limit = 60);

struct Transition {
  std::size_t from;
  std::size_t to;
  double rate;
  bool eps_rate;  // true for rate-eps (growth) transitions, false for rate-1
};

// Finite restriction of the full generator: transitions that would exceed
// the area cap are suppressed, which preserves the restricted invariant
// measure of the reversible chain.
struct TruncatedChain {
  Statistics statistics = Statistics::U;
  std::int64_t cap = 0;
  double epsilon = 0.0;
  std::vector<std::vector<std::int64_t>> state_parts;  // canonical sorted parts
  std::vector<std::int64_t> state_area;
  std::vector<Transition> transitions;

  std::size_t size() const { return state_parts.size(); }
};

TruncatedChain build_truncated_chain(Statistics statistics, std::int64_t cap, double eps);

// Row sums of the generator including the diagonal; all exactly zero by
// construction, returned for verification.
std::vector<double> generator_row_sums(const TruncatedChain& chain);

// Solves pi Q = 0 with sum pi = 1 by a dense LU solve and verifies
// ||pi Q||_inf <= 1e-12; throws NumericalError otherwise.
std::vector<double> stationary_distribution(const TruncatedChain& chain);

// Reduced fraction with 64-bit guts and overflow-checked arithmetic; big
// enough for the detailed-balance certificate at desk-scale caps.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d);
  Rational operator*(const Rational& o) const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

Rational rational_pow(const Rational& base, std::int64_t exponent);

// Detailed balance of the weights eps^area: for every transition
// (s -> s', r) the reverse transition exists and
// eps^n(s) r = eps^n(s') r' holds exactly over the rationals
// (eps = eps_num / eps_den). Returns false on any violation.
bool detailed_balance_exact(const TruncatedChain& chain, std::int64_t eps_num,
                            std::int64_t eps_den);

// Finite-sum cross-check of the mean-area series:
// sum_{n<=cap} n c(n) eps^n / sum_{n<=cap} c(n) eps^n, c = p or p_neq.
// Requires eps <= 0.7 and c(cap) eps^cap < 1e-15.
double exact_mean_area_truncated(double eps, std::int64_t cap, Statistics statistics);

// Rate-preserving bijection between the move list of the diagram process
// and the move list of the transformed exclusion process: applying each
// move and mapping the results must give identical (state, rate) multisets.
bool moves_intertwine_u(const Partition& p, double eps);
bool moves_intertwine_r(const StrictPartition& q, double eps);

}  // namespace ydsim::oracle
