#include "schwinger/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace schwinger {

TimeGrid TimeGrid::log(double t_min, double t_max, int per_decade) {
  TimeGrid g;
  g.points = log_grid(t_min, t_max, per_decade);
  g.t_min = t_min;
  g.t_max = t_max;
  g.per_decade = per_decade;
  return g;
}

TimeGrid TimeGrid::standard() { return log(1e-1, 1e12, 20); }

PhaseEvolver::PhaseEvolver(const Eigen::VectorXd& energies, const Eigen::MatrixXd& vectors,
                           const Eigen::VectorXcd& initial)
    : vectors_(vectors) {
  if (vectors.rows() != initial.size() || vectors.cols() != energies.size()) {
    throw ConfigError("initial state does not match the eigenbasis");
  }
  coeffs_ = vectors.transpose() * initial.real() + std::complex<double>(0.0, 1.0) * (vectors.transpose() * initial.imag());
  e_ref_ = energies.size() ? energies.minCoeff() : 0.0;
  shifted_.reserve(static_cast<std::size_t>(energies.size()));
  for (Eigen::Index n = 0; n < energies.size(); ++n) shifted_.push_back(two_sum(energies[n], -e_ref_));
}

Eigen::VectorXcd PhaseEvolver::amplitudes(double t) const {
  Eigen::VectorXcd a(coeffs_.size());
  for (Eigen::Index n = 0; n < a.size(); ++n) {
    double bound = 0.0;
    const double phase = reduced_phase(shifted_[static_cast<std::size_t>(n)], t, &bound);
    worst_ = std::max(worst_, bound);
    if (bound > kPhaseTolerance) {
      throw NumericalError("phase reduction error " + std::to_string(bound) + " rad at t=" + std::to_string(t), 0);
    }
    a[n] = coeffs_[n] * std::polar(1.0, -phase);
  }
  return a;
}

Eigen::VectorXcd PhaseEvolver::state(double t) const {
  const Eigen::VectorXcd a = amplitudes(t);
  Eigen::VectorXcd out(vectors_.rows());
  out.real() = vectors_ * a.real();
  out.imag() = vectors_ * a.imag();
  return out;
}

Eigen::MatrixXcd PhaseEvolver::states(const std::vector<double>& times) const {
  const auto cols = static_cast<Eigen::Index>(times.size());
  Eigen::MatrixXd re(coeffs_.size(), cols);
  Eigen::MatrixXd im(coeffs_.size(), cols);
  for (Eigen::Index k = 0; k < cols; ++k) {
    const Eigen::VectorXcd a = amplitudes(times[static_cast<std::size_t>(k)]);
    re.col(k) = a.real();
    im.col(k) = a.imag();
  }
  Eigen::MatrixXcd out(vectors_.rows(), cols);
  out.real() = vectors_ * re;
  out.imag() = vectors_ * im;
  return out;
}

void evolve_exact(const SpectralDecomposition& spec, const Eigen::VectorXcd& initial, const std::vector<double>& times,
                  const StateObserver& observer, std::size_t block) {
  if (!spec.has_vectors()) throw ConfigError("exact evolution needs eigenvectors");
  const PhaseEvolver ev(spec, initial);
  block = std::max<std::size_t>(block, 1);
  for (std::size_t start = 0; start < times.size(); start += block) {
    const std::size_t stop = std::min(times.size(), start + block);
    const std::vector<double> chunk(times.begin() + static_cast<std::ptrdiff_t>(start),
                                    times.begin() + static_cast<std::ptrdiff_t>(stop));
    const Eigen::MatrixXcd psi = ev.states(chunk);
    for (std::size_t k = start; k < stop; ++k) {
      observer(k, times[k], psi.col(static_cast<Eigen::Index>(k - start)));
    }
  }
}

Eigen::VectorXcd basis_vector(const HalfFillingBasis& basis, SpinConfig config) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
  v[static_cast<Eigen::Index>(basis.index_of(config))] = 1.0;
  return v;
}

QuenchResult run_quench(const SectorHamiltonian& h, const SpectralDecomposition& spec, const HalfFillingBasis& basis,
                        const Eigen::VectorXcd& initial, const TimeGrid& grid, int cut) {
  const Bipartition bp(basis, cut);
  const Eigen::VectorXd mu_diag = staggered_magnetization_diagonal(basis);
  QuenchResult out;
  out.entropy.grid = grid;
  out.entropy.sector = h.sector;
  out.entropy.cut = cut;
  const std::size_t n = grid.size();
  out.entropy.S_E.resize(n);
  out.entropy.S_N.resize(n);
  out.entropy.S_C.resize(n);
  out.mu.resize(n);
  out.norm.resize(n);
  out.energy.resize(n);
  Eigen::VectorXcd hpsi(initial.size());
  evolve_exact(spec, initial, grid.points, [&](std::size_t k, double, const Eigen::VectorXcd& psi) {
    const auto e = entropy_decomposition(psi, bp);
    out.entropy.S_E[k] = e.S_E;
    out.entropy.S_N[k] = e.S_N;
    out.entropy.S_C[k] = e.S_C;
    const Eigen::VectorXd prob = psi.cwiseAbs2();
    out.norm[k] = std::sqrt(prob.sum());
    out.mu[k] = mu_diag.dot(prob);
    h.apply(psi, hpsi);
    out.energy[k] = psi.dot(hpsi).real();
  });
  return out;
}

std::vector<double> smooth_log_time(const std::vector<double>& values, const std::vector<double>& times,
                                    double sigma) {
  if (values.size() != times.size()) throw ConfigError("series and grid differ in length");
  if (!(sigma > 0.0)) return values;
  std::vector<double> x(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0)) throw ConfigError("log-time smoothing needs positive times");
    x[i] = std::log10(times[i]);
  }
  std::vector<double> out(values.size());
  std::vector<double> num;
  std::vector<double> den;
  for (std::size_t i = 0; i < values.size(); ++i) {
    num.clear();
    den.clear();
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double z = (x[j] - x[i]) / sigma;
      if (std::abs(z) > 8.0) continue;
      const double wgt = std::exp(-0.5 * z * z);
      num.push_back(wgt * values[j]);
      den.push_back(wgt);
    }
    out[i] = pairwise_sum(num) / pairwise_sum(den);
  }
  return out;
}

EntropySeries smooth_log_time(const EntropySeries& s, double sigma) {
  EntropySeries out = s;
  out.S_E = smooth_log_time(s.S_E, s.grid.points, sigma);
  out.S_N = smooth_log_time(s.S_N, s.grid.points, sigma);
  out.S_C = smooth_log_time(s.S_C, s.grid.points, sigma);
  return out;
}

Aggregate aggregate(const std::vector<std::vector<double>>& rows) {
  Aggregate out;
  if (rows.empty()) return out;
  const std::size_t n = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != n) throw ConfigError("aggregated series differ in length");
  }
  std::vector<double> column(rows.size());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t s = 0; s < rows.size(); ++s) column[s] = rows[s][k];
    out.mean.push_back(mean(column));
    out.median.push_back(median(column));
    out.std.push_back(stddev(column));
  }
  return out;
}

EntropyAggregate aggregate_sectors(const std::vector<EntropySeries>& series) {
  EntropyAggregate out;
  if (series.empty()) return out;
  out.grid = series.front().grid;
  std::vector<std::vector<double>> se;
  std::vector<std::vector<double>> sn;
  std::vector<std::vector<double>> sc;
  for (const auto& s : series) {
    if (!(s.grid == out.grid)) throw ConfigError("cannot aggregate series on different time grids");
    se.push_back(s.S_E);
    sn.push_back(s.S_N);
    sc.push_back(s.S_C);
  }
  out.S_E = aggregate(se);
  out.S_N = aggregate(sn);
  out.S_C = aggregate(sc);
  return out;
}

}  // namespace schwinger
