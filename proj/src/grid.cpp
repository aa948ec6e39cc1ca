#include "ydsim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ydsim {

GridField::GridField(double xmin_, double h_, std::vector<double> values_)
    : xmin(xmin_), h(h_), values(std::move(values_)) {
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be > 0");
  if (values.empty()) throw std::invalid_argument("grid field must be non-empty");
}

double GridField::value_at(double xq) const {
  const double slack = 1e-9 * h;
  if (xq < xmin - slack || xq > xmax() + slack)
    throw std::out_of_range("interpolation point outside grid");
  double s = (xq - xmin) / h;
  s = std::clamp(s, 0.0, static_cast<double>(values.size() - 1));
  const auto k = static_cast<std::size_t>(s);
  if (k + 1 >= values.size()) return values.back();
  const double w = s - static_cast<double>(k);
  return values[k] + w * (values[k + 1] - values[k]);
}

GridField sample_function(double xmin, double h, std::size_t n,
                          const std::function<double(double)>& f) {
  std::vector<double> vals(n);
  for (std::size_t k = 0; k < n; ++k) vals[k] = f(xmin + static_cast<double>(k) * h);
  return GridField(xmin, h, std::move(vals));
}

double trapezoid(const GridField& f) {
  if (f.size() < 2) return 0.0;
  CompensatedSum acc;
  for (std::size_t k = 0; k + 1 < f.size(); ++k)
    acc.add(0.5 * f.h * (f.values[k] + f.values[k + 1]));
  return acc.value();
}

std::vector<double> cumulative_trapezoid(const GridField& f) {
  std::vector<double> out(f.size(), 0.0);
  CompensatedSum acc;
  for (std::size_t k = 1; k < f.size(); ++k) {
    acc.add(0.5 * f.h * (f.values[k - 1] + f.values[k]));
    out[k] = acc.value();
  }
  return out;
}

GridField derivative(const GridField& f) {
  const std::size_t n = f.size();
  if (n < 3) throw std::invalid_argument("derivative needs at least 3 grid points");
  std::vector<double> d(n);
  const double inv2h = 1.0 / (2.0 * f.h);
  d[0] = (-3.0 * f.values[0] + 4.0 * f.values[1] - f.values[2]) * inv2h;
  for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (f.values[k + 1] - f.values[k - 1]) * inv2h;
  d[n - 1] = (3.0 * f.values[n - 1] - 4.0 * f.values[n - 2] + f.values[n - 3]) * inv2h;
  return GridField(f.xmin, f.h, std::move(d));
}

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double sup_distance(const GridField& a, const GridField& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sup_distance: size mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    m = std::max(m, std::abs(a.values[k] - b.values[k]));
  return m;
}

MonotoneInterpolant::MonotoneInterpolant(std::vector<double> xs, std::vector<double> ys,
                                         double flat_tol)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() != ys_.size() || xs_.size() < 2)
    throw std::invalid_argument("monotone interpolant needs >= 2 matched samples");
  increasing_ = ys_.back() > ys_.front();
  for (std::size_t k = 1; k < ys_.size(); ++k) {
    const double step = ys_[k] - ys_[k - 1];
    const double signed_step = increasing_ ? step : -step;
    if (signed_step <= flat_tol)
      throw std::invalid_argument("monotone interpolant: flat or non-monotone data");
  }
}

double MonotoneInterpolant::min_value() const {
  return increasing_ ? ys_.front() : ys_.back();
}

double MonotoneInterpolant::max_value() const {
  return increasing_ ? ys_.back() : ys_.front();
}

double MonotoneInterpolant::inverse(double y) const {
  const double lo = min_value();
  const double hi = max_value();
  const double slack = 1e-9 * (hi - lo);
  if (y < lo - slack || y > hi + slack)
    throw std::out_of_range("monotone inverse: value outside range");
  y = std::clamp(y, lo, hi);
  std::size_t k;
  if (increasing_) {
    k = std::upper_bound(ys_.begin(), ys_.end(), y) - ys_.begin();
  } else {
    k = std::upper_bound(ys_.begin(), ys_.end(), y, std::greater<>()) - ys_.begin();
  }
  if (k == 0) return xs_.front();
  if (k >= ys_.size()) return xs_.back();
  const double w = (y - ys_[k - 1]) / (ys_[k] - ys_[k - 1]);
  return xs_[k - 1] + w * (xs_[k] - xs_[k - 1]);
}

void CompensatedSum::add(double term) {
  const double t = sum_ + term;
  if (std::abs(sum_) >= std::abs(term))
    comp_ += (sum_ - t) + term;
  else
    comp_ += (term - t) + sum_;
  sum_ = t;
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) throw std::runtime_error("adaptive simpson: max depth reached");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth) {
  if (!(b > a)) throw std::invalid_argument("adaptive simpson: empty interval");
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                       std::vector<double>& upper, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n)
    throw std::invalid_argument("tridiagonal solve: inconsistent sizes");
  for (std::size_t k = 1; k < n; ++k) {
    const double w = lower[k] / diag[k - 1];
    diag[k] -= w * upper[k - 1];
    rhs[k] -= w * rhs[k - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) rhs[k] = (rhs[k] - upper[k] * rhs[k + 1]) / diag[k];
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace {

double sorted_quantile(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto k = static_cast<std::size_t>(pos);
  if (k + 1 >= v.size()) return v.back();
  const double w = pos - static_cast<double>(k);
  return v[k] + w * (v[k + 1] - v[k]);
}

}  // namespace

double interquartile_range(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("iqr of empty sample");
  std::sort(v.begin(), v.end());
  return sorted_quantile(v, 0.75) - sorted_quantile(v, 0.25);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks statistic of empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    const double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
  }
  return d;
}

}  // namespace ydsim
