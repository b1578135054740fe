#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "schwinger/basis.hpp"

namespace schwinger {

struct ModelParams {
  int num_sites = 0;
  double J = 1.0;
  double w = 1.0;
  double m = 0.0;
  double theta = std::numbers::pi;

  /// Throws ConfigError unless w > 0, J >= 0 and theta in [0, 2 pi).
  void validate() const;

  /// theta / pi when it is an integer (to 1e-12), otherwise nullopt.
  std::optional<int> theta_over_pi() const;

  /// True when diagonal energies are exact integer multiples of J/2.
  bool has_integer_towers() const { return m == 0.0 && theta_over_pi().has_value(); }
};

enum class DisorderKind { uniform, discrete };

struct XXZParams {
  int num_sites = 0;
  double J_xy = 1.0;
  double J_z = 1.0;
  double W = 0.0;
  DisorderKind disorder = DisorderKind::uniform;
};

/// Nearest-neighbour exchange |..01..> <-> |..10..> on `bond`, stored once.
struct Hop {
  std::uint32_t a;
  std::uint32_t b;
  int bond;
  double amplitude;
};

/// Sector Hamiltonian H = diag + sum_hops amplitude (|a><b| + |b><a|).
struct SectorHamiltonian {
  int num_sites = 0;
  ModelParams params;
  ChargeSector sector;
  Eigen::VectorXd diag;
  std::vector<Hop> hops;
  /// Diagonal energy in integer units of `unit_energy`; present only for
  /// m = 0 with integer theta / pi (and equal Coulomb/field scales).
  std::optional<std::vector<std::int64_t>> diag_units;
  double unit_energy = 0.0;
  /// On-site fields of the XXZ comparison model; empty for Schwinger.
  std::vector<double> xxz_fields;

  std::size_t dimension() const { return static_cast<std::size_t>(diag.size()); }

  Eigen::MatrixXd dense() const;
  /// Off-diagonal (hopping) part only, as a dense matrix.
  Eigen::MatrixXd dense_hopping() const;

  /// y = H x
  void apply(const Eigen::Ref<const Eigen::VectorXcd>& x, Eigen::Ref<Eigen::VectorXcd> y) const;
  void apply(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> y) const;
};

/// h_k of the charge-dependent field plus the staggered mass (m/2)(-1)^k.
double local_field(int site, const ChargeSector& sector, const ModelParams& params);

/// h_k in units of J/2 for integer theta / pi:
/// (N-k) theta/pi - ceil((N-k)/2) + 2 sum_{j=k}^{N-1} sum_{i<=j} q_i.
std::int64_t local_field_units(int site, const ChargeSector& sector, int theta_over_pi);

/// sum_{j<k<N} (N-k) s_j s_k, i.e. H_ZZ in units of J/2.
std::int64_t coulomb_units(SpinConfig config, int num_sites);

/// sum_k h_k s_k in units of J/2 (integer theta / pi).
std::int64_t field_units(SpinConfig config, const ChargeSector& sector, int theta_over_pi);

SectorHamiltonian build_hamiltonian(const ModelParams& params, const ChargeSector& sector,
                                    const HalfFillingBasis& basis);

/// H = H_pm + J_zz H_ZZ + J_q H_q, with H_ZZ and H_q evaluated at params.J.
SectorHamiltonian build_scaled_hamiltonian(const ModelParams& params, const ChargeSector& sector,
                                           const HalfFillingBasis& basis, double J_zz, double J_q);

/// Disordered XXZ chain with on-site fields drawn from `seed`.
SectorHamiltonian build_xxz(const XXZParams& params, std::uint64_t seed,
                            const HalfFillingBasis& basis);

/// On-site XXZ disorder W_j drawn deterministically from `seed`.
std::vector<double> draw_xxz_fields(const XXZParams& params, std::uint64_t seed);

/// <vac|H|vac> in closed form for the Hamiltonian above.
double vacuum_energy(const ModelParams& params, const ChargeSector& sector);

/// (1/N) sum_j (-1)^j sigma^z_j for every basis state.
Eigen::VectorXd staggered_magnetization_diagonal(const HalfFillingBasis& basis);

double staggered_magnetization(const Eigen::Ref<const Eigen::VectorXcd>& state,
                               const HalfFillingBasis& basis);
double staggered_magnetization(const Eigen::Ref<const Eigen::VectorXd>& state,
                               const HalfFillingBasis& basis);

}  // namespace schwinger
