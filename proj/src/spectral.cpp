#include "schwinger/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>

#include <lapacke.h>

#include "schwinger/entropy.hpp"
#include "schwinger/numerics.hpp"

namespace schwinger {

SpectralDecomposition diagonalize(Eigen::MatrixXd a, bool want_vectors, std::uint64_t seed) {
  const auto n = static_cast<lapack_int>(a.rows());
  SpectralDecomposition out;
  out.energies.resize(n);
  if (n == 0) return out;
  if (want_vectors) out.vectors.resize(n, n);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'A', 'L', n, a.data(), n, 0.0, 0.0, 0, 0, 0.0, &found,
      out.energies.data(), want_vectors ? out.vectors.data() : nullptr, n, support.data());
  if (info != 0 || found != n) {
    throw NumericalError("dsyevr failed with info " + std::to_string(info), seed);
  }
  return out;
}

SpectralDecomposition diagonalize(const SectorHamiltonian& h, bool want_vectors) {
  return diagonalize(h.dense(), want_vectors, h.sector.seed);
}

Eigen::VectorXd eigenvalues(const SectorHamiltonian& h) { return diagonalize(h, false).energies; }

double orthonormality_residual(const SpectralDecomposition& spec) {
  const Eigen::MatrixXd g = spec.vectors.transpose() * spec.vectors;
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

double reconstruction_residual(const SectorHamiltonian& h, const SpectralDecomposition& spec) {
  const Eigen::MatrixXd hv = h.dense() * spec.vectors;
  return (hv - spec.vectors * spec.energies.asDiagonal()).cwiseAbs().maxCoeff();
}

double dos_peak(const Eigen::Ref<const Eigen::VectorXd>& e) {
  const Eigen::Index n = e.size();
  if (n == 0) return std::nan("");
  const double band = (e[n - 1] - e[0]) / 100.0;
  Eigen::Index best = 0;
  Eigen::Index best_count = 0;
  Eigen::Index hi = 0;
  for (Eigen::Index lo = 0; lo < n; ++lo) {
    if (hi < lo) hi = lo;
    while (hi + 1 < n && e[hi + 1] <= e[lo] + band) ++hi;
    if (hi - lo + 1 > best_count) {
      best_count = hi - lo + 1;
      best = lo;
    }
  }
  return e[best] + 0.5 * band;
}

LevelWindow closest_levels(const Eigen::Ref<const Eigen::VectorXd>& e, Eigen::Index k, double centre) {
  const Eigen::Index n = e.size();
  k = std::clamp<Eigen::Index>(k, 0, n);
  // first level >= centre, then grow outwards
  Eigen::Index right = std::lower_bound(e.data(), e.data() + n, centre) - e.data();
  Eigen::Index left = right;
  while (right - left < k) {
    if (left == 0) {
      ++right;
    } else if (right == n) {
      --left;
    } else if (centre - e[left - 1] <= e[right] - centre) {
      --left;
    } else {
      ++right;
    }
  }
  return {left, right, centre};
}

Eigen::Index default_r_window(Eigen::Index dimension) { return std::min<Eigen::Index>(1000, dimension / 3); }

std::vector<double> r_values(const Eigen::Ref<const Eigen::VectorXd>& e, const LevelWindow& w) {
  std::vector<double> r;
  if (w.size() < 3) return r;
  const double floor = 1e-12 * (e[e.size() - 1] - e[0]);
  for (Eigen::Index i = w.begin; i + 2 < w.end; ++i) {
    const double s1 = e[i + 1] - e[i];
    const double s2 = e[i + 2] - e[i + 1];
    const double hi = std::max(s1, s2);
    if (hi < floor || hi <= 0.0) continue;
    r.push_back(std::min(s1, s2) / hi);
  }
  return r;
}

double sector_mean_r(const Eigen::Ref<const Eigen::VectorXd>& e, Eigen::Index k) {
  if (k <= 0) k = default_r_window(e.size());
  if (k < 3 || k > e.size()) throw ConfigError("r window must satisfy 3 <= k <= D");
  const auto r = r_values(e, closest_levels(e, k, dos_peak(e)));
  if (r.empty()) {
    std::cerr << "warning: every gap pair in the r window is degenerate\n";
    return std::nan("");
  }
  return mean(r);
}

RStatResult r_statistic(const std::vector<Eigen::VectorXd>& spectra, Eigen::Index k) {
  RStatResult out;
  std::vector<double> valid;
  for (const auto& e : spectra) {
    const Eigen::Index kk = k > 0 ? k : default_r_window(e.size());
    out.k = kk;
    out.centres.push_back(dos_peak(e));
    const double r = sector_mean_r(e, kk);
    out.per_sector_mean_r.push_back(r);
    if (!std::isnan(r)) valid.push_back(r);
  }
  out.grand_mean = mean(valid);
  out.grand_sem = valid.size() > 1 ? stddev(valid) / std::sqrt(static_cast<double>(valid.size() - 1)) : 0.0;
  return out;
}

Histogram dos_histogram(const Eigen::Ref<const Eigen::VectorXd>& e, double J, double bin_width) {
  if (!(J > 0.0)) throw ConfigError("DOS in units of J needs J > 0");
  if (!(bin_width > 0.0)) throw ConfigError("bin width must be positive");
  Histogram h;
  h.bin_width = bin_width;
  if (e.size() == 0) return h;
  const auto first = static_cast<long>(std::floor(e.minCoeff() / J / bin_width));
  const auto last = static_cast<long>(std::floor(e.maxCoeff() / J / bin_width));
  h.counts.assign(static_cast<std::size_t>(last - first + 1), 0.0);
  for (long b = first; b <= last; ++b) h.centres.push_back((static_cast<double>(b) + 0.5) * bin_width);
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    const auto b = static_cast<long>(std::floor(e[i] / J / bin_width));
    h.counts[static_cast<std::size_t>(b - first)] += 1.0;
  }
  return h;
}

void accumulate(Histogram& acc, const Histogram& other) {
  if (other.centres.empty()) return;
  if (acc.centres.empty()) {
    acc = other;
    return;
  }
  if (acc.bin_width != other.bin_width) throw ConfigError("histograms use different bin widths");
  const double w = acc.bin_width;
  auto index = [w](double c) { return static_cast<long>(std::lround(c / w - 0.5)); };
  const long lo = std::min(index(acc.centres.front()), index(other.centres.front()));
  const long hi = std::max(index(acc.centres.back()), index(other.centres.back()));
  Histogram merged;
  merged.bin_width = w;
  merged.counts.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (long b = lo; b <= hi; ++b) merged.centres.push_back((static_cast<double>(b) + 0.5) * w);
  for (const Histogram* h : std::initializer_list<const Histogram*>{&acc, &other}) {
    for (std::size_t i = 0; i < h->centres.size(); ++i) {
      merged.counts[static_cast<std::size_t>(index(h->centres[i]) - lo)] += h->counts[i];
    }
  }
  acc = std::move(merged);
}

std::vector<double> autocorrelation(const std::vector<double>& counts, std::size_t max_lag) {
  const std::size_t n = counts.size();
  std::vector<double> acf(std::min(max_lag + 1, n), 0.0);
  if (n == 0) return acf;
  const double mu = mean(counts);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = counts[i] - mu;
  std::vector<double> terms;
  for (std::size_t lag = 0; lag < acf.size(); ++lag) {
    terms.clear();
    for (std::size_t i = 0; i + lag < n; ++i) terms.push_back(d[i] * d[i + lag]);
    acf[lag] = pairwise_sum(terms);
  }
  if (acf[0] > 0.0) {
    const double norm = acf[0];
    for (double& a : acf) a /= norm;
  }
  return acf;
}

std::vector<double> mean_autocorrelation(const std::vector<Histogram>& histograms, std::size_t max_lag) {
  std::vector<double> sum(max_lag + 1, 0.0);
  std::vector<std::size_t> count(max_lag + 1, 0);
  for (const auto& h : histograms) {
    const auto acf = autocorrelation(h.counts, max_lag);
    if (acf.empty() || acf[0] != 1.0) continue;  // flat histogram
    for (std::size_t k = 0; k < acf.size(); ++k) {
      sum[k] += acf[k];
      ++count[k];
    }
  }
  std::size_t n = 0;
  while (n < count.size() && count[n] > 0) ++n;
  sum.resize(n);
  for (std::size_t k = 0; k < n; ++k) sum[k] /= static_cast<double>(count[k]);
  return sum;
}

std::size_t dominant_lag(const std::vector<double>& acf, std::size_t min_lag) {
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t lag = std::max<std::size_t>(min_lag, 1); lag + 1 < acf.size(); ++lag) {
    if (acf[lag] >= acf[lag - 1] && acf[lag] >= acf[lag + 1] && acf[lag] > best_value) {
      best = lag;
      best_value = acf[lag];
    }
  }
  return best;
}

MeanStd eigenstate_entropy_stats(const SpectralDecomposition& spec, const HalfFillingBasis& basis, int cut,
                                 double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("fraction must lie in (0, 1]");
  if (!spec.has_vectors()) throw ConfigError("eigenstate entropies need eigenvectors");
  const Eigen::Index d = spec.energies.size();
  const auto k = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(fraction * static_cast<double>(d))));
  const LevelWindow w = closest_levels(spec.energies, k, dos_peak(spec.energies));
  const Bipartition bp(basis, cut);
  std::vector<double> s;
  for (Eigen::Index i = w.begin; i < w.end; ++i) {
    s.push_back(entropy_decomposition(Eigen::VectorXd(spec.vectors.col(i)), bp).S_E);
  }
  return {mean(s), stddev(s)};
}

Eigen::VectorXd unfold(const Eigen::Ref<const Eigen::VectorXd>& e, int degree) {
  const Eigen::Index n = e.size();
  if (n < 50) throw ConfigError("unfolding needs at least 50 levels");
  if (degree < 1) throw ConfigError("unfolding degree must be >= 1");
  const double mu = e.mean();
  const double scale = std::sqrt((e.array() - mu).square().mean());
  if (!(scale > 0.0)) throw ConfigError("degenerate spectrum cannot be unfolded");
  Eigen::MatrixXd v(n, degree + 1);
  Eigen::VectorXd staircase(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = (e[i] - mu) / scale;
    double p = 1.0;
    for (int c = 0; c <= degree; ++c) {
      v(i, c) = p;
      p *= x;
    }
    staircase[i] = static_cast<double>(i + 1);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(v);
  if (qr.rank() < degree + 1) throw ConfigError("unfolding fit is rank deficient");
  const Eigen::VectorXd coeffs = qr.solve(staircase);
  return v * coeffs;
}

Eigen::VectorXd goe_eigenvalues(int dimension, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(dimension, dimension);
  for (Eigen::Index j = 0; j < dimension; ++j) {
    for (Eigen::Index i = 0; i < dimension; ++i) a(i, j) = g(rng);
  }
  Eigen::MatrixXd h = 0.5 * (a + a.transpose());
  return diagonalize(std::move(h), false, seed).energies;
}

double goe_sff(double tau) {
  if (tau <= 0.0) return 0.0;
  if (tau <= 1.0) return tau * (2.0 - std::log1p(2.0 * tau));
  return 2.0 - tau * std::log((2.0 * tau + 1.0) / (2.0 * tau - 1.0));
}

std::vector<double> default_tau_grid() { return log_grid(1e-4, 10.0, 20); }

namespace {

struct SffMoments {
  double k_raw;          // < |S|^2 >
  double disconnected;   // | < S > |^2
};

SffMoments sff_moments(const std::vector<Eigen::VectorXd>& eps, double tau) {
  std::vector<double> mod2;
  std::vector<double> re;
  std::vector<double> im;
  std::vector<double> terms_re;
  std::vector<double> terms_im;
  for (const auto& e : eps) {
    terms_re.resize(static_cast<std::size_t>(e.size()));
    terms_im.resize(static_cast<std::size_t>(e.size()));
    for (Eigen::Index j = 0; j < e.size(); ++j) {
      const double phase = -2.0 * std::numbers::pi * e[j] * tau;
      terms_re[static_cast<std::size_t>(j)] = std::cos(phase);
      terms_im[static_cast<std::size_t>(j)] = std::sin(phase);
    }
    const double sr = pairwise_sum(terms_re);
    const double si = pairwise_sum(terms_im);
    mod2.push_back(sr * sr + si * si);
    re.push_back(sr);
    im.push_back(si);
  }
  const double mr = mean(re);
  const double mi = mean(im);
  return {mean(mod2), mr * mr + mi * mi};
}

}  // namespace

SFFResult connected_sff(const std::vector<Eigen::VectorXd>& eps, const std::vector<double>& tau_grid) {
  if (eps.empty()) throw ConfigError("form factor needs at least one spectrum");
  if (eps.size() < 100) std::cerr << "warning: only " << eps.size() << " spectra in the form factor average\n";
  SFFResult out;
  out.tau = tau_grid;

  // A fixes K_c(0) = 0, Z fixes the late-time plateau at 1.
  const SffMoments zero = sff_moments(eps, 0.0);
  out.A = zero.k_raw / zero.disconnected;
  std::vector<double> plateau;
  for (double t : log_grid(4.0, 16.0, 40)) {
    const SffMoments m = sff_moments(eps, t);
    plateau.push_back(m.k_raw - out.A * m.disconnected);
  }
  out.Z = mean(plateau);
  if (!(out.Z > 0.0)) {
    // single spectrum: the connected part vanishes identically
    out.Z = 1.0;
  }

  for (double t : tau_grid) {
    const SffMoments m = sff_moments(eps, t);
    out.K_c.push_back((m.k_raw - out.A * m.disconnected) / out.Z);
  }

  // geometric moving average over 5 grid points
  const std::size_t n = out.K_c.size();
  out.K_c_smooth.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= 2 ? i - 2 : 0;
    const std::size_t hi = std::min(n - 1, i + 2);
    double acc = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) acc += std::log(std::max(out.K_c[j], 1e-300));
    out.K_c_smooth[i] = std::exp(acc / static_cast<double>(hi - lo + 1));
  }

  out.tau_goe = n ? tau_grid.front() : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = std::abs(std::log10(out.K_c_smooth[i] / goe_sff(tau_grid[i])));
    if (!(dev < 0.08)) out.tau_goe = tau_grid[i];
  }
  return out;
}

double thouless_parameter(const SectorHamiltonian& h, const HalfFillingBasis& basis, int site, double strength) {
  if (strength < 0.0) strength = h.params.w / 10.0;
  if (site < 1 || site > basis.num_sites()) throw ConfigError("perturbation site out of range");
  const SpectralDecomposition spec = diagonalize(h, true);
  Eigen::VectorXd v_diag(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) v_diag[static_cast<Eigen::Index>(i)] = strength * basis[i].sz(site);
  Eigen::MatrixXd perturbed = h.dense();
  perturbed.diagonal() += v_diag;
  const Eigen::VectorXd e_prime = diagonalize(std::move(perturbed), false, h.sector.seed).energies;

  const Eigen::Index d = spec.energies.size();
  const double floor = 1e-14 * (e_prime[d - 1] - e_prime[0]);
  const auto k = std::max<Eigen::Index>(2, static_cast<Eigen::Index>(std::llround(d / 3.0)));
  const LevelWindow w = closest_levels(e_prime, k, dos_peak(e_prime));
  std::vector<double> g;
  for (Eigen::Index n = w.begin; n < w.end && n + 1 < d; ++n) {
    const double gap = e_prime[n + 1] - e_prime[n];
    const double v = std::abs(spec.vectors.col(n).dot(v_diag.cwiseProduct(spec.vectors.col(n + 1))));
    if (gap < floor || gap <= 0.0 || v == 0.0) continue;
    g.push_back(std::log(v / gap));
  }
  return g.empty() ? std::nan("") : mean(g);
}

}  // namespace schwinger
