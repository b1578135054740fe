#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace schwinger {

/// Pairwise (cascade) summation; result is independent of how the input was
/// produced as long as the order of elements is fixed.
double pairwise_sum(std::span<const double> values);

double mean(std::span<const double> values);
/// Population standard deviation.
double stddev(std::span<const double> values);
double median(std::vector<double> values);

/// Points 10^(lo + k / per_decade) for k = 0..round((hi - lo) * per_decade).
std::vector<double> log_grid(double t_min, double t_max, int per_decade);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_err = 0.0;
  double intercept_err = 0.0;
  /// Reduced chi^2 of the weighted residuals.
  double chi2_red = 0.0;
};

/// Weighted least-squares line y = intercept + slope x. Weights are inverse
/// variances up to a common factor; errors are rescaled by the residual
/// scatter. With `absolute_weights` the weights are true inverse variances and
/// the scatter only inflates errors (factor max(1, chi2_red)).
LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> weights,
                 bool absolute_weights = false);

/// Double-double value hi + lo with |lo| <= ulp(hi)/2.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;
};

/// Exact a + b.
DoubleDouble two_sum(double a, double b);
/// Exact a * b.
DoubleDouble two_prod(double a, double b);

/// Reduces (a_hi + a_lo) * t modulo 2 pi into [-pi, pi] using double-double
/// arithmetic. `bound` receives an upper estimate of the absolute error.
double reduced_phase(DoubleDouble a, double t, double* bound = nullptr);

}  // namespace schwinger
