#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "schwinger/basis.hpp"
#include "schwinger/entropy.hpp"
#include "schwinger/numerics.hpp"
#include "schwinger/spectral.hpp"

namespace schwinger {

/// Log-spaced times in units of 1/w.
struct TimeGrid {
  std::vector<double> points;
  double t_min = 0.0;
  double t_max = 0.0;
  int per_decade = 0;

  static TimeGrid log(double t_min, double t_max, int per_decade);
  /// 1e-1 .. 1e12 at 20 points per decade.
  static TimeGrid standard();
  std::size_t size() const { return points.size(); }
  bool operator==(const TimeGrid&) const = default;
};

/// |n> amplitudes evolved with exp(-i (E_n - E_ref) t); phases reduced in
/// double-double arithmetic.
class PhaseEvolver {
 public:
  /// `vectors` columns are eigenvectors; `initial` is in the same basis as
  /// the rows. E_ref defaults to the lowest energy.
  PhaseEvolver(const Eigen::VectorXd& energies, const Eigen::MatrixXd& vectors, const Eigen::VectorXcd& initial);
  PhaseEvolver(const SpectralDecomposition& spec, const Eigen::VectorXcd& initial)
      : PhaseEvolver(spec.energies, spec.vectors, initial) {}

  /// State at time t (rows of `vectors`).
  Eigen::VectorXcd state(double t) const;
  /// States at several times, one column each.
  Eigen::MatrixXcd states(const std::vector<double>& times) const;

  /// Eigenbasis amplitudes at time t.
  Eigen::VectorXcd amplitudes(double t) const;
  const Eigen::VectorXcd& initial_amplitudes() const { return coeffs_; }
  double reference_energy() const { return e_ref_; }

  /// Largest phase-reduction error bound seen so far (radians).
  double worst_phase_error() const { return worst_; }

  static constexpr double kPhaseTolerance = 1e-6;

 private:
  const Eigen::MatrixXd& vectors_;
  Eigen::VectorXcd coeffs_;
  std::vector<DoubleDouble> shifted_;
  double e_ref_ = 0.0;
  mutable double worst_ = 0.0;
};

using StateObserver = std::function<void(std::size_t index, double t, const Eigen::VectorXcd& state)>;

/// Exact evolution over the grid; the observer sees each state in order.
/// Times are processed in blocks of `block` columns.
void evolve_exact(const SpectralDecomposition& spec, const Eigen::VectorXcd& initial, const std::vector<double>& times,
                  const StateObserver& observer, std::size_t block = 32);

struct EntropySeries {
  TimeGrid grid;
  std::vector<double> S_E;
  std::vector<double> S_N;
  std::vector<double> S_C;
  ChargeSector sector;
  int cut = 0;
};

struct QuenchResult {
  EntropySeries entropy;
  std::vector<double> mu;
  std::vector<double> norm;
  std::vector<double> energy;
};

/// Entropies, staggered magnetization, norm and energy along an exact
/// quench trajectory.
QuenchResult run_quench(const SectorHamiltonian& h, const SpectralDecomposition& spec, const HalfFillingBasis& basis,
                        const Eigen::VectorXcd& initial, const TimeGrid& grid, int cut);

/// |config> as a state vector.
Eigen::VectorXcd basis_vector(const HalfFillingBasis& basis, SpinConfig config);

/// Gaussian convolution in log10(t), renormalized at the edges.
std::vector<double> smooth_log_time(const std::vector<double>& values, const std::vector<double>& times,
                                    double sigma_decades = 0.1);
EntropySeries smooth_log_time(const EntropySeries& series, double sigma_decades = 0.1);

struct Aggregate {
  std::vector<double> mean;
  std::vector<double> median;
  std::vector<double> std;
};

/// Pointwise mean, median and standard deviation across equal-length rows.
Aggregate aggregate(const std::vector<std::vector<double>>& rows);

struct EntropyAggregate {
  TimeGrid grid;
  Aggregate S_E;
  Aggregate S_N;
  Aggregate S_C;
};

/// Throws ConfigError on mixed grids.
EntropyAggregate aggregate_sectors(const std::vector<EntropySeries>& series);

}  // namespace schwinger
