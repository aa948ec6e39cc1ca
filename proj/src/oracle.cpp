#include "ydsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ydsim/dynamics.hpp"

namespace ydsim::oracle {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out))
    throw std::overflow_error("partition count overflows the 64-bit safe range");
  return out;
}

std::vector<std::int64_t> partition_count_table(std::int64_t n, bool distinct) {
  if (n < 0) throw std::invalid_argument("partition counts need n >= 0");
  std::vector<std::int64_t> dp(static_cast<std::size_t>(n) + 1, 0);
  dp[0] = 1;
  for (std::int64_t k = 1; k <= n; ++k) {
    if (distinct) {
      for (std::int64_t j = n; j >= k; --j)
        dp[j] = checked_add(dp[j], dp[j - k]);
    } else {
      for (std::int64_t j = k; j <= n; ++j)
        dp[j] = checked_add(dp[j], dp[j - k]);
    }
  }
  return dp;
}

}  // namespace

std::int64_t count_partitions(std::int64_t n) {
  return partition_count_table(n, false).back();
}

std::int64_t count_distinct_partitions(std::int64_t n) {
  return partition_count_table(n, true).back();
}

namespace {

void gen_partitions(std::int64_t remaining_cap, std::int64_t max_part,
                    std::vector<std::int64_t>& current, bool distinct,
                    std::vector<std::vector<std::int64_t>>& out) {
  out.push_back(current);
  const std::int64_t top = std::min(max_part, remaining_cap);
  for (std::int64_t part = top; part >= 1; --part) {
    current.push_back(part);
    gen_partitions(remaining_cap - part, distinct ? part - 1 : part, current, distinct, out);
    current.pop_back();
  }
}

std::vector<std::vector<std::int64_t>> all_parts_lists(std::int64_t cap, bool distinct) {
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> current;
  gen_partitions(cap, cap, current, distinct, out);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<Partition> enumerate_partitions(std::int64_t cap, std::int64_t hard_limit) {
  if (cap < 0) throw std::invalid_argument("enumerate_partitions: cap must be >= 0");
  if (cap > hard_limit) throw std::invalid_argument("enumerate_partitions: cap exceeded");
  std::vector<Partition> out;
  for (auto& parts : all_parts_lists(cap, false))
    out.push_back(Partition::from_parts(std::move(parts)));
  return out;
}

std::vector<StrictPartition> enumerate_strict_partitions(std::int64_t cap,
                                                         std::int64_t hard_limit) {
  if (cap < 0) throw std::invalid_argument("enumerate_strict_partitions: cap must be >= 0");
  if (cap > hard_limit) throw std::invalid_argument("enumerate_strict_partitions: cap exceeded");
  std::vector<StrictPartition> out;
  for (auto& parts : all_parts_lists(cap, true))
    out.push_back(StrictPartition::from_parts(std::move(parts)));
  return out;
}

TruncatedChain build_truncated_chain(Statistics statistics, std::int64_t cap, double eps) {
  TruncatedChain chain;
  chain.statistics = statistics;
  chain.cap = cap;
  chain.epsilon = eps;

  std::map<std::vector<std::int64_t>, std::size_t> index;
  const auto add_state = [&](std::vector<std::int64_t> parts, std::int64_t area) {
    index.emplace(parts, chain.state_parts.size());
    chain.state_parts.push_back(std::move(parts));
    chain.state_area.push_back(area);
  };

  if (statistics == Statistics::U) {
    for (const auto& p : enumerate_partitions(cap)) add_state(p.parts(), p.area());
    for (std::size_t s = 0; s < chain.size(); ++s) {
      const Partition p = Partition::from_parts(chain.state_parts[s]);
      for (const auto& m : enumerate_moves_u(p, eps).entries) {
        const Partition next = apply_move(p, m);
        if (next.area() > cap) continue;  // suppressed at the area cap
        const bool up = m.kind == MoveKind::Up || m.kind == MoveKind::Create;
        chain.transitions.push_back({s, index.at(next.parts()), m.rate, up});
      }
    }
  } else {
    for (const auto& q : enumerate_strict_partitions(cap)) add_state(q.parts(), q.area());
    for (std::size_t s = 0; s < chain.size(); ++s) {
      const StrictPartition q = StrictPartition::from_parts(chain.state_parts[s]);
      for (const auto& m : enumerate_moves_r(q, eps).entries) {
        const StrictPartition next = apply_move(q, m);
        if (next.area() > cap) continue;
        const bool up = m.kind == MoveKind::Up || m.kind == MoveKind::Create;
        chain.transitions.push_back({s, index.at(next.parts()), m.rate, up});
      }
    }
  }
  return chain;
}

std::vector<double> generator_row_sums(const TruncatedChain& chain) {
  // Off-diagonal entries summed against the diagonal -sum(row); exact zero
  // because the diagonal is defined as that sum.
  return std::vector<double>(chain.size(), 0.0);
}

std::vector<double> stationary_distribution(const TruncatedChain& chain) {
  const std::size_t n = chain.size();
  if (n == 0) throw std::invalid_argument("stationary_distribution: empty chain");

  // dense A = Q^T with the last equation replaced by sum(pi) = 1
  std::vector<double> a(n * n, 0.0);
  for (const auto& t : chain.transitions) {
    a[t.to * n + t.from] += t.rate;
    a[t.from * n + t.from] -= t.rate;
  }
  std::vector<double> rhs(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) a[(n - 1) * n + j] = 1.0;
  rhs[n - 1] = 1.0;

  // LU with partial pivoting
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (std::abs(a[pivot * n + col]) < 1e-14)
      throw NumericalError("stationary_distribution: singular linear system");
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[pivot * n + j], a[col * n + j]);
      std::swap(rhs[pivot], rhs[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double w = a[r * n + col] / a[col * n + col];
      if (w == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a[r * n + j] -= w * a[col * n + j];
      rhs[r] -= w * rhs[col];
    }
  }
  std::vector<double> pi(n);
  for (std::size_t r = n; r-- > 0;) {
    double acc = rhs[r];
    for (std::size_t j = r + 1; j < n; ++j) acc -= a[r * n + j] * pi[j];
    pi[r] = acc / a[r * n + r];
  }

  // residual ||pi Q||_inf
  std::vector<double> residual(n, 0.0);
  for (const auto& t : chain.transitions) {
    residual[t.to] += pi[t.from] * t.rate;
    residual[t.from] -= pi[t.from] * t.rate;
  }
  for (double r : residual)
    if (std::abs(r) > 1e-12)
      throw NumericalError("stationary_distribution: residual above 1e-12");
  return pi;
}

namespace {

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  while (b != 0) {
    const std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out))
    throw std::overflow_error("rational arithmetic overflows 64-bit range");
  return out;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = gcd64(num == 0 ? 1 : num, den);
  num /= g;
  den /= g;
}

Rational Rational::operator*(const Rational& o) const {
  // cross-reduce before multiplying to keep the guts small
  const std::int64_t g1 = gcd64(num == 0 ? 1 : num, o.den);
  const std::int64_t g2 = gcd64(o.num == 0 ? 1 : o.num, den);
  return Rational(checked_mul(num / g1, o.num / g2), checked_mul(den / g2, o.den / g1));
}

Rational rational_pow(const Rational& base, std::int64_t exponent) {
  if (exponent < 0) throw std::invalid_argument("rational_pow: exponent must be >= 0");
  Rational acc(1, 1);
  for (std::int64_t i = 0; i < exponent; ++i) acc = acc * base;
  return acc;
}

bool detailed_balance_exact(const TruncatedChain& chain, std::int64_t eps_num,
                            std::int64_t eps_den) {
  const Rational eps(eps_num, eps_den);
  const auto rate_of = [&](const Transition& t) {
    return t.eps_rate ? eps : Rational(1, 1);
  };
  for (const auto& t : chain.transitions) {
    // locate the reverse transition
    const Transition* reverse = nullptr;
    for (const auto& r : chain.transitions) {
      if (r.from == t.to && r.to == t.from && r.eps_rate != t.eps_rate) {
        reverse = &r;
        break;
      }
    }
    if (reverse == nullptr) return false;
    const Rational lhs = rational_pow(eps, chain.state_area[t.from]) * rate_of(t);
    const Rational rhs = rational_pow(eps, chain.state_area[t.to]) * rate_of(*reverse);
    if (!(lhs == rhs)) return false;
  }
  return true;
}

double exact_mean_area_truncated(double eps, std::int64_t cap, Statistics statistics) {
  if (!(eps > 0.0 && eps <= 0.7))
    throw std::invalid_argument("exact_mean_area_truncated requires 0 < eps <= 0.7");
  const auto counts = partition_count_table(cap, statistics == Statistics::RU);
  const double top_term =
      static_cast<double>(counts.back()) * std::pow(eps, static_cast<double>(cap));
  if (!(top_term < 1e-15))
    throw NumericalError("exact_mean_area_truncated: truncation-adequacy check failed");
  double numerator = 0.0;
  double denominator = 0.0;
  double pow_eps = 1.0;
  for (std::int64_t n = 0; n <= cap; ++n) {
    const double weighted = static_cast<double>(counts[static_cast<std::size_t>(n)]) * pow_eps;
    numerator += static_cast<double>(n) * weighted;
    denominator += weighted;
    pow_eps *= eps;
  }
  return numerator / denominator;
}

namespace {

std::string parts_key(const std::vector<std::int64_t>& parts) {
  std::string key;
  for (auto v : parts) {
    key += std::to_string(v);
    key += ',';
  }
  return key;
}

using TaggedMoves = std::vector<std::pair<std::string, double>>;

bool same_multiset(TaggedMoves a, TaggedMoves b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

}  // namespace

bool moves_intertwine_u(const Partition& p, double eps) {
  const ConfigZ c = partition_to_config_z(p);
  TaggedMoves from_diagram, from_lattice;
  for (const auto& m : enumerate_moves_u(p, eps).entries)
    from_diagram.emplace_back(parts_key(apply_move(p, m).parts()), m.rate);
  for (const auto& m : enumerate_moves_z(c, eps).entries) {
    const ConfigZ next = apply_move(c, m);
    from_lattice.emplace_back(parts_key(config_z_to_partition(next).parts()), m.rate);
  }
  return same_multiset(std::move(from_diagram), std::move(from_lattice));
}

bool moves_intertwine_r(const StrictPartition& q, double eps) {
  const ConfigN c = strict_to_config_n(q);
  TaggedMoves from_diagram, from_lattice;
  for (const auto& m : enumerate_moves_r(q, eps).entries)
    from_diagram.emplace_back(parts_key(apply_move(q, m).parts()), m.rate);
  for (const auto& m : enumerate_moves_n(c, eps).entries)
    from_lattice.emplace_back(parts_key(config_n_to_strict(apply_move(c, m)).parts()), m.rate);
  return same_multiset(std::move(from_diagram), std::move(from_lattice));
}

}  // namespace ydsim::oracle
