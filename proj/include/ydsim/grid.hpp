#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace ydsim {

// Values of a function on the uniform grid {xmin + k h : k = 0..n-1}.
struct GridField {
  double xmin = 0.0;
  double h = 1.0;
  std::vector<double> values;

  GridField() = default;
  GridField(double xmin_, double h_, std::vector<double> values_);

  std::size_t size() const { return values.size(); }
  double x(std::size_t k) const { return xmin + static_cast<double>(k) * h; }
  double xmax() const { return x(values.empty() ? 0 : values.size() - 1); }

  // Piecewise-linear interpolation; rejects points outside the grid
  // (up to a half-ulp slack at the ends).
  double value_at(double xq) const;

  friend bool operator==(const GridField&, const GridField&) = default;
};

GridField sample_function(double xmin, double h, std::size_t n,
                          const std::function<double(double)>& f);

// Trapezoid rule over the full grid.
double trapezoid(const GridField& f);

// Running trapezoid integral from the left edge; result[k] = int_{x0}^{x_k}.
std::vector<double> cumulative_trapezoid(const GridField& f);

// Centered first derivative (one-sided second-order at the ends).
GridField derivative(const GridField& f);

double sup_norm(const std::vector<double>& v);
double sup_distance(const GridField& a, const GridField& b);

// Inverts a strictly monotone grid function by piecewise-linear
// interpolation. Construction rejects flat spots (|step| <= flat_tol).
class MonotoneInterpolant {
 public:
  MonotoneInterpolant(std::vector<double> xs, std::vector<double> ys,
                      double flat_tol = 1e-14);

  // x such that the interpolated function equals y; rejects y outside range.
  double inverse(double y) const;
  double min_value() const;
  double max_value() const;

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;  // strictly monotone
  bool increasing_ = true;
};

// Kahan-Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double term);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Adaptive Simpson quadrature to absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 48);

// Thomas algorithm for a tridiagonal system; diagonals are destroyed.
void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                       std::vector<double>& upper, std::vector<double>& rhs);

double median(std::vector<double> v);
double interquartile_range(std::vector<double> v);

// Two-sample Kolmogorov-Smirnov statistic sup |F1 - F2|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

}  // namespace ydsim
