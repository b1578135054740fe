#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "schwinger/basis.hpp"
#include "schwinger/model.hpp"

namespace schwinger {

/// LHS - RHS of the resonance condition for bond l,
///   sum_{j<l} s_j + 2 Q_l - (l mod 2) + theta/pi,
/// in exact integers.
std::int64_t resonance_offset(SpinConfig config, int bond, const ChargeSector& sector, int theta_over_pi);

/// Diagonal-energy change, in units of J, of exchanging the antialigned
/// spins on (bond, bond + 1). Throws ConfigError for aligned spins.
std::int64_t hop_energy_change(SpinConfig config, int bond, const ChargeSector& sector, int theta_over_pi);

/// True iff the exchange on `bond` costs no diagonal energy. Non-integer
/// theta / pi is never resonant (a warning is printed once).
bool is_resonant(SpinConfig config, int bond, const ChargeSector& sector, double theta);

/// Basis indices grouped by integer diagonal label, ordered by label.
using TowerIndex = std::map<std::int64_t, std::vector<std::uint32_t>>;
TowerIndex build_towers(const SectorHamiltonian& h);

struct KrylovSubspace {
  std::vector<std::uint32_t> states;           // sorted basis indices
  std::vector<std::vector<int>> active_regions;  // sorted site lists
  std::optional<std::vector<std::size_t>> factor_dims;
  std::vector<int> bonds;                      // resonant bonds used
  bool crosses_center = false;
};

struct KrylovDecomposition {
  std::int64_t tower_label = 0;
  std::vector<KrylovSubspace> subspaces;  // ordered by smallest state index
};

/// Connected components of a tower under resonant exchanges.
KrylovDecomposition decompose_tower(const SectorHamiltonian& h, const HalfFillingBasis& basis,
                                    std::int64_t label, const std::vector<std::uint32_t>& states);

/// Decomposes every tower of the sector.
std::vector<KrylovDecomposition> decompose_sector(const SectorHamiltonian& h, const HalfFillingBasis& basis);

/// Component of a single configuration, found without a basis.
struct Component {
  std::vector<SpinConfig> states;  // sorted
  std::vector<int> bonds;          // sorted
};
Component krylov_component(SpinConfig start, int num_sites, const ChargeSector& sector, int theta_over_pi);

/// Maximal runs of consecutive bonds, as site lists.
std::vector<std::vector<int>> regions_from_bonds(const std::vector<int>& bonds);

/// Per-region sub-dimensions when the component factorizes over regions.
std::optional<std::vector<std::size_t>> factorize(const std::vector<SpinConfig>& states,
                                                  const std::vector<std::vector<int>>& regions);

bool component_crosses_center(const std::vector<int>& bonds, int num_sites);

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// Monte-Carlo p_cross over (random half-filling state, random sector) pairs.
Estimate p_cross_estimate(int num_sites, int samples, std::uint64_t master_seed, int theta_over_pi = 1);

/// Exact fraction of basis states of one sector whose component crosses the
/// central bond.
double p_cross_exhaustive(const ChargeSector& sector, const HalfFillingBasis& basis, int theta_over_pi = 1);

/// Uniformly random half-filling configuration.
SpinConfig random_half_filling(int num_sites, std::uint64_t seed);

struct FragmentationRow {
  std::int64_t tower_label;
  std::size_t subspace_id;
  std::size_t dimension;
  std::size_t n_active_regions;
  bool crosses_center;
};
std::vector<FragmentationRow> fragmentation_rows(const std::vector<KrylovDecomposition>& towers);

}  // namespace schwinger
