#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "schwinger/basis.hpp"
#include "schwinger/dynamics.hpp"
#include "schwinger/fragmentation.hpp"
#include "schwinger/model.hpp"
#include "schwinger/spectral.hpp"

namespace schwinger {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Hopping blocks between towers. Tower i is the i-th entry of `labels`
/// (ascending). block(i, j) maps tower i into tower j: rows index states of
/// tower j, columns index states of tower i.
struct TowerBlocks {
  std::vector<std::int64_t> labels;
  std::vector<std::vector<std::uint32_t>> states;
  std::vector<double> energies;  // unperturbed energy of each tower
  std::map<std::pair<std::size_t, std::size_t>, SparseMatrix> blocks;

  std::size_t tower_of_label(std::int64_t label) const;
  /// Zero matrix of the right shape when no hop connects the towers.
  SparseMatrix block(std::size_t from, std::size_t to) const;
};

TowerBlocks build_T_blocks(const SectorHamiltonian& h, const TowerIndex& towers);

enum class Coefficients {
  schrieffer_wolff,  // standard Schrieffer-Wolff coefficients (default)
  as_printed,        // second order with 1/(E_a - E_0), a != b third-order factor 3/((E_a-E_0)(E_b-E_0))
};

struct EffectiveHamiltonian {
  int order = 0;
  std::int64_t tower_label = 0;
  std::vector<std::uint32_t> states;  // basis indices of the tower
  std::vector<Eigen::MatrixXd> terms;  // H^[0] .. H^[order]
  Eigen::MatrixXd matrix;              // cumulative sum
  std::vector<double> energy_denominators;  // (E_a - E_0) / J of the towers used
  double hermiticity_residual = 0.0;        // before symmetrization
};

/// Cumulative H^[0] + ... + H^[order] on the tower with the given label.
EffectiveHamiltonian build_effective(const SectorHamiltonian& h, const TowerBlocks& blocks, std::int64_t label,
                                     int order, Coefficients coefficients = Coefficients::schrieffer_wolff);

/// Evolution under the effective Hamiltonian, one column per time.
Eigen::MatrixXcd evolve_dpt(const EffectiveHamiltonian& heff, const Eigen::VectorXcd& initial,
                            const std::vector<double>& times);

/// P_0 exp(-iHt) |psi>, unnormalized, one column per time (tower coordinates).
Eigen::MatrixXcd evolve_dpt_infinite(const SpectralDecomposition& spec, const std::vector<std::uint32_t>& tower,
                                     const Eigen::VectorXcd& initial, const std::vector<double>& times);

/// Tower coordinates -> full basis vector.
Eigen::VectorXcd embed(const std::vector<std::uint32_t>& tower, std::size_t dimension, const Eigen::VectorXcd& v);
/// Full basis vector -> tower coordinates (projection).
Eigen::VectorXcd restrict_to(const std::vector<std::uint32_t>& tower, const Eigen::VectorXcd& v);

}  // namespace schwinger
