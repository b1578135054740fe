#include "schwinger/numerics.hpp"

#include <algorithm>
#include <stdexcept>

namespace schwinger {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double mean(std::span<const double> values) {
  if (values.empty()) return std::nan("");
  return pairwise_sum(values) / static_cast<double>(values.size());
}

double stddev(std::span<const double> values) {
  if (values.empty()) return std::nan("");
  const double mu = mean(values);
  std::vector<double> sq(values.size());
  std::transform(values.begin(), values.end(), sq.begin(), [mu](double v) { return (v - mu) * (v - mu); });
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(values.size()));
}

double median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return (n % 2 == 1) ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<double> log_grid(double t_min, double t_max, int per_decade) {
  if (!(t_min > 0.0) || !(t_max > t_min) || per_decade < 1) {
    throw std::invalid_argument("log_grid needs 0 < t_min < t_max and per_decade >= 1");
  }
  const double lo = std::log10(t_min);
  const double hi = std::log10(t_max);
  const auto steps = static_cast<long>(std::lround((hi - lo) * per_decade));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps + 1));
  for (long k = 0; k <= steps; ++k) out.push_back(std::pow(10.0, lo + static_cast<double>(k) / per_decade));
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> weights,
                 bool absolute_weights) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n || weights.size() != n) throw std::invalid_argument("fit_line needs >= 2 matching points");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += weights[i];
    sx += weights[i] * x[i];
    sy += weights[i] * y[i];
  }
  const double xm = sx / sw;
  const double ym = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += weights[i] * (x[i] - xm) * (x[i] - xm);
    sxy += weights[i] * (x[i] - xm) * (y[i] - ym);
  }
  if (sxx <= 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = ym - f.slope * xm;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    chi2 += weights[i] * r * r;
  }
  f.chi2_red = (n > 2) ? chi2 / static_cast<double>(n - 2) : 0.0;
  double scale = (n > 2) ? f.chi2_red : 1.0;
  if (absolute_weights) scale = std::max(1.0, scale);
  f.slope_err = std::sqrt(scale / sxx);
  f.intercept_err = std::sqrt(scale * (1.0 / sw + xm * xm / sxx));
  return f;
}

DoubleDouble two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

DoubleDouble two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

namespace {

constexpr DoubleDouble kTwoPi{6.283185307179586232e+00, 2.449293598294706414e-16};

DoubleDouble dd_add(DoubleDouble a, DoubleDouble b) {
  DoubleDouble s = two_sum(a.hi, b.hi);
  s.lo += a.lo + b.lo;
  return two_sum(s.hi, s.lo);
}

}  // namespace

double reduced_phase(DoubleDouble a, double t, double* bound) {
  // phase = a * t as a double-double
  DoubleDouble p = two_prod(a.hi, t);
  p.lo = std::fma(a.lo, t, p.lo);
  p = two_sum(p.hi, p.lo);

  const double k = std::nearbyint(p.hi / kTwoPi.hi);
  DoubleDouble kp = two_prod(k, kTwoPi.hi);
  kp.lo = std::fma(k, kTwoPi.lo, kp.lo);
  const DoubleDouble r = dd_add(p, DoubleDouble{-kp.hi, -kp.lo});
  const double phase = r.hi + r.lo;
  if (bound) {
    const double u = 0x1.0p-104;
    *bound = (std::abs(p.hi) + std::abs(k) * kTwoPi.hi) * u * 8.0 + std::abs(k) * 1e-32;
  }
  return phase;
}

}  // namespace schwinger
