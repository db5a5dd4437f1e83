#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace dspde::num {

// Adaptive Simpson quadrature. Tolerances are combined as
// |I - I_fine| <= max(abs_tol, rel_tol * |I|).
double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-12, double abs_tol = 1e-14);

// Same, split at interior breakpoints (integrand kinks).
double adaptive_quad_split(const std::function<double(double)>& f,
                           const std::vector<double>& points, double rel_tol = 1e-12,
                           double abs_tol = 1e-14);

// Monotone piecewise-cubic interpolant (Fritsch-Carlson slopes). Values stay
// inside the local data range, so interpolating monotone data never
// overshoots and positive data stays positive.
class Pchip {
public:
  Pchip() = default;
  Pchip(std::vector<double> x, std::vector<double> y);
  double operator()(double x) const;
  double derivative(double x) const;
  bool empty() const { return x_.empty(); }
  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }
  double y_front() const { return y_.front(); }
  double y_back() const { return y_.back(); }

private:
  std::size_t interval(double x) const;
  std::vector<double> x_, y_, d_;
};

// Root of increasing f on [lo, hi] by Newton steps clipped to a maintained
// bracket (bisection fallback). Requires f(lo) <= 0 <= f(hi).
double newton_bisect(const std::function<double(double)>& f,
                     const std::function<double(double)>& df, double lo, double hi,
                     double x0, double f_tol, int max_iter = 200);

struct LineFit {
  double slope = 0;
  double intercept = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Two-sample Kolmogorov-Smirnov statistic; inputs need not be sorted.
double ks_distance(std::vector<double> a, std::vector<double> b);

// Wilson score lower confidence bound for a binomial proportion.
double wilson_lower(std::size_t successes, std::size_t n, double z = 1.96);

// Quantile with linear interpolation; data must be sorted.
double quantile_sorted(const std::vector<double>& sorted, double q);

}  // namespace dspde::num
