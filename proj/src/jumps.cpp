#include "schwinger/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "schwinger/basis.hpp"
#include "schwinger/numerics.hpp"
#include "schwinger/spectral.hpp"

namespace schwinger {

std::vector<JumpEvent> detect_jumps(const std::vector<double>& series, const std::vector<double>& times,
                                    const JumpOptions& opt, std::uint64_t sector_seed) {
  if (series.size() != times.size()) throw ConfigError("series and grid differ in length");
  if (!(opt.dlog > 0.0) || !(opt.min_step > 0.0)) throw ConfigError("dlog and min_step must be positive");
  if (opt.anchor_shift < 0.0 || opt.anchor_shift >= opt.dlog) throw ConfigError("anchor_shift must lie in [0, dlog)");
  std::vector<JumpEvent> out;
  if (times.size() < 2) return out;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw ConfigError("times must be strictly increasing");
  }
  if (!(times.front() > 0.0)) throw ConfigError("jump detection needs positive times");

  std::vector<double> cummax(series.size());
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < series.size(); ++i) cummax[i] = m = std::max(m, series[i]);

  // boundaries and the cumulative max there
  const double l0 = std::log10(times.front());
  const double l1 = std::log10(times.back());
  std::vector<double> bt;
  std::vector<double> bm;
  std::size_t j = 0;
  for (int k = 0;; ++k) {
    const double lb = l0 + opt.anchor_shift + k * opt.dlog;
    if (lb > l1 + 1e-12) break;
    const double t = std::pow(10.0, lb);
    while (j + 1 < times.size() && times[j + 1] <= t * (1 + 1e-12)) ++j;
    bt.push_back(t);
    bm.push_back(cummax[j]);
  }
  std::size_t i = 0;
  while (i + 1 < bt.size()) {
    if (bm[i + 1] - bm[i] < opt.min_step) {
      ++i;
      continue;
    }
    std::size_t e = i + 1;
    while (e + 1 < bt.size() && bm[e + 1] - bm[e] >= opt.min_step) ++e;
    JumpEvent ev;
    ev.sector_seed = sector_seed;
    ev.t_start = bt[i];
    ev.t_end = bt[e];
    ev.tau_J = std::sqrt(bt[i] * bt[e]);
    ev.height = bm[e] - bm[i];
    out.push_back(ev);
    i = e;
  }
  return out;
}

std::string to_string(FitMethod method) {
  switch (method) {
    case FitMethod::histogram: return "histogram";
    case FitMethod::histogram_mle: return "histogram_mle";
    case FitMethod::entropy_fit: return "entropy_fit";
  }
  return "unknown";
}

JumpHistogram jump_histogram(const std::vector<JumpEvent>& events, double t_lo, double t_hi, int bpd) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo) || bpd < 1) throw ConfigError("bad jump histogram window");
  const double span = std::log10(t_hi / t_lo);
  const int nb = std::max(1, static_cast<int>(std::lround(span * bpd)));
  JumpHistogram h;
  for (int b = 0; b <= nb; ++b) h.edges.push_back(t_lo * std::pow(10.0, span * b / nb));
  h.edges.back() = t_hi;
  std::vector<double> sum(static_cast<std::size_t>(nb), 0.0);
  std::vector<double> sum2(static_cast<std::size_t>(nb), 0.0);
  h.counts.assign(static_cast<std::size_t>(nb), 0);
  for (const auto& ev : events) {
    if (ev.tau_J < t_lo || ev.tau_J >= t_hi) continue;
    const auto b = static_cast<std::size_t>(
        std::min<double>(nb - 1, std::floor(std::log10(ev.tau_J / t_lo) / span * nb)));
    sum[b] += ev.height;
    sum2[b] += ev.height * ev.height;
    ++h.counts[b];
  }
  const double ln10 = std::log(10.0);
  for (std::size_t b = 0; b < sum.size(); ++b) {
    h.centres.push_back(std::sqrt(h.edges[b] * h.edges[b + 1]));
    h.density.push_back(sum[b] / (h.edges[b + 1] - h.edges[b]));
    // var(log10 sum) for a compound Poisson count
    h.weights.push_back(sum2[b] > 0 ? ln10 * ln10 * sum[b] * sum[b] / sum2[b] : 0.0);
  }
  return h;
}

namespace {

// mean log-likelihood per unit height of tau^-(alpha+1) on [ln a, ln b]
double power_loglik(double alpha, const std::vector<double>& logt, const std::vector<double>& h, double la, double lb) {
  const double g = -alpha;
  const double norm = std::abs(g) < 1e-12 ? (lb - la) : std::exp(g * la) * std::expm1(g * (lb - la)) / g;
  double s = 0.0;
  double hs = 0.0;
  for (std::size_t i = 0; i < logt.size(); ++i) {
    // density in log tau is tau^-alpha
    s += h[i] * (g * logt[i] - std::log(norm));
    hs += h[i];
  }
  return s / hs;
}

}  // namespace

PowerLawFit fit_jump_histogram(const std::vector<JumpEvent>& events, double t_end, const HistogramFitOptions& opt) {
  if (events.size() < opt.min_events) {
    throw ConfigError("jump histogram needs at least " + std::to_string(opt.min_events) + " events, got " +
                      std::to_string(events.size()));
  }
  double t_lo = opt.t_lo;
  if (!(t_lo > 0.0)) {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& ev : events) lo = std::min(lo, ev.tau_J);
    t_lo = lo * std::pow(10.0, -0.5 / opt.bins_per_decade);
  }
  const double t_hi = opt.t_hi > 0.0 ? opt.t_hi : t_end / std::sqrt(10.0);
  if (!(t_hi > t_lo)) throw ConfigError("jump fit window is empty");

  PowerLawFit fit;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  if (opt.mle) {
    fit.method = FitMethod::histogram_mle;
    std::vector<double> logt;
    std::vector<double> h;
    double hs = 0.0;
    double hs2 = 0.0;
    for (const auto& ev : events) {
      if (ev.tau_J < t_lo || ev.tau_J >= t_hi) continue;
      logt.push_back(std::log(ev.tau_J));
      h.push_back(ev.height);
      hs += ev.height;
      hs2 += ev.height * ev.height;
    }
    if (logt.size() < 2) throw NumericalError("too few jumps inside the fit window", 0);
    const double la = std::log(t_lo);
    const double lb = std::log(t_hi);
    auto neg = [&](double a) { return -power_loglik(a, logt, h, la, lb); };
    const auto [a, f] = boost::math::tools::brent_find_minima(neg, -1.5, 3.0, 40);
    (void)f;
    if (a < -1.5 + 1e-6 || a > 3.0 - 1e-6) throw NumericalError("jump MLE ran to the bound alpha=" + std::to_string(a), 0);
    const double step = 1e-3;
    const double curv = (neg(a + step) - 2 * neg(a) + neg(a - step)) / (step * step);
    const double n_eff = hs * hs / hs2;
    fit.alpha = a;
    fit.alpha_err = curv > 0 ? 1.0 / std::sqrt(n_eff * curv) : std::numeric_limits<double>::infinity();
    fit.points = static_cast<int>(logt.size());
    return fit;
  }

  const auto hist = jump_histogram(events, t_lo, t_hi, opt.bins_per_decade);
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> w;
  for (std::size_t b = 0; b < hist.centres.size(); ++b) {
    if (hist.counts[b] == 0 || !(hist.density[b] > 0.0)) continue;
    x.push_back(std::log10(hist.centres[b]));
    y.push_back(std::log10(hist.density[b]));
    w.push_back(hist.weights[b]);
  }
  if (x.size() < 5) throw NumericalError("jump histogram has " + std::to_string(x.size()) + " populated bins (< 5)", 0);
  const LineFit lf = fit_line(x, y, w, true);
  fit.method = FitMethod::histogram;
  fit.alpha = -lf.slope - 1.0;
  fit.alpha_err = lf.slope_err;
  fit.points = static_cast<int>(x.size());
  return fit;
}

PowerLawFit fit_entropy_powerlaw(const std::vector<double>& times, const std::vector<double>& values, double t_lo,
                                 double t_hi) {
  if (times.size() != values.size()) throw ConfigError("series and grid differ in length");
  std::vector<double> lt;
  std::vector<double> y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || (t_hi > 0.0 && times[i] > t_hi)) continue;
    lt.push_back(std::log(times[i]));
    y.push_back(values[i]);
  }
  const auto n = static_cast<Eigen::Index>(y.size());
  if (n < 4) throw ConfigError("entropy fit needs at least 4 points in the window");
  const Eigen::Map<const Eigen::VectorXd> Y(y.data(), n);

  // linear (S_inf, -S_0) for fixed alpha
  auto solve = [&](double alpha, Eigen::Vector2d& coef) {
    Eigen::MatrixXd A(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      A(i, 0) = 1.0;
      A(i, 1) = std::exp(-alpha * lt[static_cast<std::size_t>(i)]);
    }
    coef = A.colPivHouseholderQr().solve(Y);
    return (A * coef - Y).squaredNorm();
  };
  auto rss = [&](double alpha) {
    Eigen::Vector2d c;
    return solve(alpha, c);
  };

  // coarse scan, then Brent inside the best bracket
  const double a_min = 1e-5;
  const double a_max = 5.0;
  const int scan = 80;
  std::vector<double> grid(scan);
  std::size_t best = 0;
  double best_r = std::numeric_limits<double>::infinity();
  for (int k = 0; k < scan; ++k) {
    grid[static_cast<std::size_t>(k)] = a_min * std::pow(a_max / a_min, static_cast<double>(k) / (scan - 1));
    const double r = rss(grid[static_cast<std::size_t>(k)]);
    if (r < best_r) {
      best_r = r;
      best = static_cast<std::size_t>(k);
    }
  }
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[std::min<std::size_t>(best + 1, grid.size() - 1)];
  double alpha = boost::math::tools::brent_find_minima(rss, lo, hi, std::numeric_limits<double>::digits).first;
  if (!std::isfinite(best_r) || alpha <= a_min * 1.0001 || alpha >= a_max * 0.9999) {
    std::ostringstream msg;
    msg << "power-law fit did not converge (initial alpha guess " << grid[best] << ", bracket [" << lo << ", " << hi
        << "], result " << alpha << ")";
    throw NumericalError(msg.str(), 0);
  }

  // Gauss-Newton polish on all three parameters
  Eigen::Vector2d c;
  solve(alpha, c);
  Eigen::Vector3d p(c[0], c[1], alpha);
  Eigen::MatrixXd Jm(n, 3);
  Eigen::VectorXd r(n);
  auto residual = [&](const Eigen::Vector3d& q) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double e = std::exp(-q[2] * lt[static_cast<std::size_t>(i)]);
      r[i] = q[0] + q[1] * e - Y[i];
      Jm(i, 0) = 1.0;
      Jm(i, 1) = e;
      Jm(i, 2) = -q[1] * e * lt[static_cast<std::size_t>(i)];
    }
    return r.squaredNorm();
  };
  double cur = residual(p);
  for (int it = 0; it < 20; ++it) {
    const Eigen::Vector3d dp = Jm.colPivHouseholderQr().solve(-r);
    const Eigen::Vector3d q = p + dp;
    const double next = residual(q);
    if (!(next < cur)) {
      residual(p);
      break;
    }
    p = q;
    cur = next;
  }

  PowerLawFit fit;
  fit.method = FitMethod::entropy_fit;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi > 0.0 ? t_hi : std::exp(lt.back());
  fit.S_inf = p[0];
  fit.S_0 = -p[1];
  fit.alpha = p[2];
  fit.points = static_cast<int>(n);
  fit.rms_residual = std::sqrt(cur / static_cast<double>(n));
  const double s2 = cur / static_cast<double>(n - 3);
  const Eigen::Matrix3d cov = s2 * (Jm.transpose() * Jm).inverse();
  fit.S_inf_err = std::sqrt(std::max(0.0, cov(0, 0)));
  fit.S_0_err = std::sqrt(std::max(0.0, cov(1, 1)));
  fit.alpha_err = std::sqrt(std::max(0.0, cov(2, 2)));
  return fit;
}

}  // namespace schwinger
