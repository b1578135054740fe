#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "schwinger/basis.hpp"
#include "schwinger/model.hpp"

namespace schwinger {

/// Eigensolver failure; carries the seed of the offending sector.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::uint64_t sector_seed)
      : std::runtime_error(what + " (sector seed " + std::to_string(sector_seed) + ")"),
        seed_(sector_seed) {}
  std::uint64_t sector_seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

struct SpectralDecomposition {
  Eigen::VectorXd energies;  // ascending
  Eigen::MatrixXd vectors;   // column i <-> energies[i]; empty if not requested

  bool has_vectors() const { return vectors.size() > 0; }
  double width() const { return energies.size() ? energies[energies.size() - 1] - energies[0] : 0.0; }
};

/// Full dense eigendecomposition (LAPACK dsyevr).
SpectralDecomposition diagonalize(const SectorHamiltonian& h, bool want_vectors = true);
SpectralDecomposition diagonalize(Eigen::MatrixXd matrix, bool want_vectors, std::uint64_t seed = 0);
Eigen::VectorXd eigenvalues(const SectorHamiltonian& h);

/// Max-abs of V^T V - I.
double orthonormality_residual(const SpectralDecomposition& spec);
/// Max-abs of H V - V E.
double reconstruction_residual(const SectorHamiltonian& h, const SpectralDecomposition& spec);

/// Centre of the fullest band of width (spectral width) / 100.
double dos_peak(const Eigen::Ref<const Eigen::VectorXd>& energies);

/// Half-open index range [begin, end) of the k sorted levels closest to
/// `centre`.
struct LevelWindow {
  Eigen::Index begin = 0;
  Eigen::Index end = 0;
  double centre = 0.0;
  Eigen::Index size() const { return end - begin; }
};
LevelWindow closest_levels(const Eigen::Ref<const Eigen::VectorXd>& energies, Eigen::Index k, double centre);

/// Default window size min(1000, D / 3).
Eigen::Index default_r_window(Eigen::Index dimension);

/// Gap ratios inside the window; pairs with max gap < 1e-12 * width are
/// skipped.
std::vector<double> r_values(const Eigen::Ref<const Eigen::VectorXd>& energies, const LevelWindow& window);

/// Mean r of one spectrum in the window of size k at the DOS peak; NaN when
/// every pair is skipped.
double sector_mean_r(const Eigen::Ref<const Eigen::VectorXd>& energies, Eigen::Index k);

struct RStatResult {
  std::vector<double> per_sector_mean_r;
  double grand_mean = 0.0;
  double grand_sem = 0.0;
  Eigen::Index k = 0;
  std::vector<double> centres;
};

/// Aggregates sector means (NaN sectors dropped from the grand mean).
RStatResult r_statistic(const std::vector<Eigen::VectorXd>& spectra, Eigen::Index k = 0);

struct Histogram {
  std::vector<double> centres;
  std::vector<double> counts;
  double bin_width = 0.0;
};

/// Histogram of E / J with a fixed bin width in units of J, bins aligned to
/// multiples of the width.
Histogram dos_histogram(const Eigen::Ref<const Eigen::VectorXd>& energies, double J, double bin_width);
/// Adds `other` into `acc` (bins aligned on the same lattice).
void accumulate(Histogram& acc, const Histogram& other);

/// Normalized autocorrelation of the mean-subtracted counts for lags
/// 0..max_lag bins.
std::vector<double> autocorrelation(const std::vector<double>& counts, std::size_t max_lag);

/// Average of the per-histogram autocorrelations (sectors with different
/// tower offsets do not wash out each other's period). Lags beyond a
/// histogram's length are averaged over the histograms that reach them.
std::vector<double> mean_autocorrelation(const std::vector<Histogram>& histograms, std::size_t max_lag);

/// Lag (in bins) of the largest local maximum of `acf` with lag >= min_lag.
std::size_t dominant_lag(const std::vector<double>& acf, std::size_t min_lag = 1);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

/// Entanglement entropy over the `fraction` of eigenstates closest to the
/// DOS peak.
MeanStd eigenstate_entropy_stats(const SpectralDecomposition& spec, const HalfFillingBasis& basis,
                                 int cut, double fraction = 1.0 / 3.0);

/// Polynomial unfolding of the cumulative staircase to unit mean spacing.
Eigen::VectorXd unfold(const Eigen::Ref<const Eigen::VectorXd>& energies, int poly_degree = 6);

/// Eigenvalues of one D x D GOE matrix (off-diagonal variance 1/2).
Eigen::VectorXd goe_eigenvalues(int dimension, std::uint64_t seed);

/// GOE connected form factor (full two-branch expression).
double goe_sff(double tau);

struct SFFResult {
  std::vector<double> tau;
  std::vector<double> K_c;
  std::vector<double> K_c_smooth;
  double tau_goe = 0.0;
  double Z = 0.0;
  double A = 0.0;
};

std::vector<double> default_tau_grid();

/// Connected form factor of unfolded spectra (one per sector).
SFFResult connected_sff(const std::vector<Eigen::VectorXd>& unfolded, const std::vector<double>& tau_grid);

/// Mean Thouless parameter over the third of states closest to the DOS
/// peak; `strength` multiplies sigma^z on `site`.
double thouless_parameter(const SectorHamiltonian& h, const HalfFillingBasis& basis, int site = 1,
                          double strength = -1.0);

}  // namespace schwinger
