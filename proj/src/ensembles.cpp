#include "ydsim/ensembles.hpp"

#include <cmath>
#include <string>

#include "ydsim/grid.hpp"

namespace ydsim {

const char* statistics_name(Statistics s) { return s == Statistics::U ? "U" : "RU"; }

Statistics statistics_from_name(const std::string& name) {
  if (name == "U") return Statistics::U;
  if (name == "RU") return Statistics::RU;
  throw std::invalid_argument("unknown statistics: " + name + " (expected U or RU)");
}

double log_weight(const Partition& p, const EnsembleParams& params) {
  if (params.statistics != Statistics::U)
    throw std::invalid_argument("log_weight: partition state requires U statistics");
  return static_cast<double>(p.area()) * std::log(params.epsilon);
}

double log_weight(const StrictPartition& q, const EnsembleParams& params) {
  if (params.statistics != Statistics::RU)
    throw std::invalid_argument("log_weight: strict partition state requires RU statistics");
  return static_cast<double>(q.area()) * std::log(params.epsilon);
}

double log_partition_function(const EnsembleParams& params, const SeriesControl& ctl) {
  ctl.validate();
  const double eps = params.epsilon;
  CompensatedSum acc;
  double pow_eps = 1.0;
  const double tail_factor = 1.0 / ((1.0 - eps) * (1.0 - eps));
  for (std::int64_t k = 1; k <= ctl.max_terms; ++k) {
    pow_eps *= eps;
    acc.add(params.statistics == Statistics::U ? -std::log1p(-pow_eps)
                                               : std::log1p(pow_eps));
    // remaining terms are bounded by eps^(k+1) / (1 - eps)^2 in both cases
    if (pow_eps * eps * tail_factor < ctl.abs_tol) return acc.value();
  }
  throw NumericalError("log_partition_function: tolerance not reached within max_terms");
}

double mean_area(const EnsembleParams& params, const SeriesControl& ctl) {
  ctl.validate();
  const double eps = params.epsilon;
  const bool alternating = params.statistics == Statistics::RU;
  CompensatedSum acc;
  double pow_eps = 1.0;
  const double tail_factor = 1.0 / ((1.0 - eps) * (1.0 - eps) * (1.0 - eps));
  for (std::int64_t m = 1; m <= ctl.max_terms; ++m) {
    pow_eps *= eps;
    const double denom = 1.0 - pow_eps;
    const double term = pow_eps / (denom * denom);
    acc.add(alternating && m % 2 == 0 ? -term : term);
    // For U the tail is below eps^(m+1)/(1-eps)^3; for RU the terms decrease
    // in magnitude, so the next term bounds the alternating tail.
    const double tail_bound =
        alternating ? pow_eps * eps / ((1.0 - pow_eps * eps) * (1.0 - pow_eps * eps))
                    : pow_eps * eps * tail_factor;
    if (tail_bound < ctl.abs_tol) return acc.value();
  }
  throw NumericalError("mean_area: tolerance not reached within max_terms");
}

double solve_epsilon(std::int64_t n_scale, Statistics statistics, const SeriesControl& ctl) {
  if (n_scale < 1) throw std::invalid_argument("solve_epsilon: N must be >= 1");
  const double target = static_cast<double>(n_scale) * static_cast<double>(n_scale);
  const double residual_tol = 1e-10 * target;

  SeriesControl series = ctl;
  series.abs_tol = std::min(ctl.abs_tol, 0.01 * residual_tol);

  const auto mean_at = [&](double eps) {
    return mean_area(EnsembleParams(eps, statistics), series);
  };

  double lo = 1e-9;
  if (mean_at(lo) > target)
    throw NumericalError("solve_epsilon: no bracket, target below the grid");
  double hi = 0.5;
  while (mean_at(hi) < target) {
    hi = 1.0 - 0.5 * (1.0 - hi);
    if (1.0 - hi < 1e-13)
      throw NumericalError("solve_epsilon: no bracket inside (0,1)");
  }

  if (statistics == Statistics::RU) {
    // Monotonicity of the alternating series is not assumed; check it on
    // the bracket before bisecting.
    const int probes = 17;
    double prev = mean_at(lo);
    for (int i = 1; i <= probes; ++i) {
      const double eps = lo + (hi - lo) * static_cast<double>(i) / probes;
      const double cur = mean_at(eps);
      if (cur < prev)
        throw NumericalError("solve_epsilon: mean area not monotone on bracket");
      prev = cur;
    }
  }

  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double value = mean_at(mid);
    if (std::abs(value - target) <= residual_tol) return mid;
    (value < target ? lo : hi) = mid;
    if (hi - lo < 1e-17 * hi) break;
  }
  throw NumericalError("solve_epsilon: residual tolerance not reached");
}

namespace {

// Largest part value worth considering: beyond K the probability of any
// further nonzero draw is below 1e-12 in both statistics
// (sum_{k>K} eps^k = eps^(K+1) / (1-eps)).
std::int64_t sampler_cutoff(double eps) {
  const double tail = 1e-12 * (1.0 - eps);
  const std::int64_t k = static_cast<std::int64_t>(std::ceil(std::log(tail) / std::log(eps)));
  return std::max<std::int64_t>(k, 1);
}

}  // namespace

Partition sample_partition(const EnsembleParams& params, UnitSource& rng) {
  if (params.statistics != Statistics::U)
    throw std::invalid_argument("sample_partition requires U statistics");
  const double eps = params.epsilon;
  const double log_eps = std::log(eps);
  std::vector<PartBlock> blocks;
  for (std::int64_t k = sampler_cutoff(eps); k >= 1; --k) {
    // Geometric multiplicity via inverse transform: P(m >= j) = eps^(kj).
    const double u = rng.next_unit_pos();
    const auto mult = static_cast<std::int64_t>(
        std::floor(std::log(u) / (static_cast<double>(k) * log_eps)));
    if (mult >= 1) blocks.push_back({k, mult});
  }
  return Partition::from_blocks(std::move(blocks));
}

StrictPartition sample_strict_partition(const EnsembleParams& params, UnitSource& rng) {
  if (params.statistics != Statistics::RU)
    throw std::invalid_argument("sample_strict_partition requires RU statistics");
  const double eps = params.epsilon;
  std::vector<std::int64_t> parts;
  double pow_eps = std::pow(eps, static_cast<double>(sampler_cutoff(eps)));
  for (std::int64_t k = sampler_cutoff(eps); k >= 1; --k) {
    if (rng.next_unit() < pow_eps / (1.0 + pow_eps)) parts.push_back(k);
    pow_eps /= eps;
  }
  return StrictPartition::from_parts(std::move(parts));
}

}  // namespace ydsim
