#include "schwinger/fragmentation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iostream>
#include <mutex>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "schwinger/numerics.hpp"

namespace schwinger {

std::int64_t resonance_offset(SpinConfig config, int bond, const ChargeSector& sector, int theta_over_pi) {
  std::int64_t left = 0;
  for (int j = 1; j < bond; ++j) left += config.sz(j);
  return left + 2 * sector.prefix(bond) - (bond % 2) + theta_over_pi;
}

std::int64_t hop_energy_change(SpinConfig config, int bond, const ChargeSector& sector, int theta_over_pi) {
  if (bond < 1 || bond >= sector.num_sites()) throw ConfigError("bond out of range");
  if (!config.antialigned(bond)) throw ConfigError("exchange undefined on aligned spins");
  const std::int64_t offset = resonance_offset(config, bond, sector, theta_over_pi);
  // particle moving left onto `bond` raises sigma_l
  return config.occupied(bond) ? -offset : offset;
}

bool is_resonant(SpinConfig config, int bond, const ChargeSector& sector, double theta) {
  const ModelParams probe{sector.num_sites(), 1.0, 1.0, 0.0, theta};
  const auto top = probe.theta_over_pi();
  if (!top) {
    static std::once_flag warned;
    std::call_once(warned, [] { std::cerr << "warning: non-integer theta/pi, no exchange is resonant\n"; });
    if (!config.antialigned(bond)) throw ConfigError("exchange undefined on aligned spins");
    return false;
  }
  return hop_energy_change(config, bond, sector, *top) == 0;
}

TowerIndex build_towers(const SectorHamiltonian& h) {
  if (!h.diag_units) throw ConfigError("towers need integer diagonal labels (m = 0, integer theta/pi)");
  TowerIndex towers;
  const auto& u = *h.diag_units;
  for (std::size_t i = 0; i < u.size(); ++i) towers[u[i]].push_back(static_cast<std::uint32_t>(i));
  return towers;
}

std::vector<std::vector<int>> regions_from_bonds(const std::vector<int>& bonds) {
  std::vector<int> sorted = bonds;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::vector<int>> regions;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[j] + 1) ++j;
    std::vector<int> sites;
    for (int s = sorted[i]; s <= sorted[j] + 1; ++s) sites.push_back(s);
    regions.push_back(std::move(sites));
    i = j + 1;
  }
  return regions;
}

std::optional<std::vector<std::size_t>> factorize(const std::vector<SpinConfig>& states,
                                                  const std::vector<std::vector<int>>& regions) {
  std::vector<std::size_t> dims;
  std::size_t product = 1;
  for (const auto& region : regions) {
    std::uint32_t mask = 0;
    for (int s : region) mask |= 1u << (s - 1);
    std::unordered_set<std::uint32_t> seen;
    for (SpinConfig c : states) seen.insert(c.bits() & mask);
    dims.push_back(seen.size());
    product *= seen.size();
  }
  if (product != states.size()) return std::nullopt;
  return dims;
}

bool component_crosses_center(const std::vector<int>& bonds, int num_sites) {
  return std::find(bonds.begin(), bonds.end(), num_sites / 2) != bonds.end();
}

namespace {

int require_integer_theta(const ModelParams& params) {
  const auto top = params.theta_over_pi();
  if (!top) throw ConfigError("fragmentation needs integer theta/pi");
  return *top;
}

}  // namespace

KrylovDecomposition decompose_tower(const SectorHamiltonian& h, const HalfFillingBasis& basis, std::int64_t label,
                                    const std::vector<std::uint32_t>& states) {
  const int top = require_integer_theta(h.params);
  const int n = basis.num_sites();
  if (h.diag_units) {
    for (auto s : states) {
      if ((*h.diag_units)[s] != label) throw ConfigError("state outside the requested tower");
    }
  }
  std::vector<std::uint32_t> sorted = states;
  std::sort(sorted.begin(), sorted.end());
  std::unordered_map<std::uint32_t, int> component_of;
  for (auto s : sorted) component_of[s] = -1;

  KrylovDecomposition out;
  out.tower_label = label;
  for (auto seed : sorted) {
    if (component_of[seed] >= 0) continue;
    const int id = static_cast<int>(out.subspaces.size());
    KrylovSubspace sub;
    std::set<int> bonds;
    std::deque<std::uint32_t> queue{seed};
    component_of[seed] = id;
    while (!queue.empty()) {
      const auto a = queue.front();
      queue.pop_front();
      sub.states.push_back(a);
      const SpinConfig c = basis[a];
      for (int bond = 1; bond < n; ++bond) {
        if (!c.antialigned(bond) || hop_energy_change(c, bond, h.sector, top) != 0) continue;
        bonds.insert(bond);
        const auto b = static_cast<std::uint32_t>(basis.index_of(c.exchanged(bond)));
        auto it = component_of.find(b);
        if (it == component_of.end()) throw ConfigError("resonant hop left the tower");
        if (it->second < 0) {
          it->second = id;
          queue.push_back(b);
        }
      }
    }
    std::sort(sub.states.begin(), sub.states.end());
    sub.bonds.assign(bonds.begin(), bonds.end());
    sub.active_regions = regions_from_bonds(sub.bonds);
    std::vector<SpinConfig> configs;
    for (auto s : sub.states) configs.push_back(basis[s]);
    sub.factor_dims = factorize(configs, sub.active_regions);
    sub.crosses_center = component_crosses_center(sub.bonds, n);
    out.subspaces.push_back(std::move(sub));
  }
  return out;
}

std::vector<KrylovDecomposition> decompose_sector(const SectorHamiltonian& h, const HalfFillingBasis& basis) {
  std::vector<KrylovDecomposition> out;
  for (const auto& [label, states] : build_towers(h)) out.push_back(decompose_tower(h, basis, label, states));
  return out;
}

Component krylov_component(SpinConfig start, int num_sites, const ChargeSector& sector, int theta_over_pi) {
  std::unordered_set<std::uint32_t> seen{start.bits()};
  std::deque<SpinConfig> queue{start};
  std::set<int> bonds;
  Component out;
  while (!queue.empty()) {
    const SpinConfig c = queue.front();
    queue.pop_front();
    out.states.push_back(c);
    for (int bond = 1; bond < num_sites; ++bond) {
      if (!c.antialigned(bond) || hop_energy_change(c, bond, sector, theta_over_pi) != 0) continue;
      bonds.insert(bond);
      const SpinConfig next = c.exchanged(bond);
      if (seen.insert(next.bits()).second) queue.push_back(next);
    }
  }
  std::sort(out.states.begin(), out.states.end());
  out.bonds.assign(bonds.begin(), bonds.end());
  return out;
}

SpinConfig random_half_filling(int num_sites, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> sites(static_cast<std::size_t>(num_sites));
  for (int i = 0; i < num_sites; ++i) sites[static_cast<std::size_t>(i)] = i;
  // Fisher-Yates with an unbiased bounded draw
  for (int i = num_sites - 1; i > 0; --i) {
    const auto bound = static_cast<std::uint64_t>(i + 1);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = rng();
    } while (x >= limit);
    std::swap(sites[static_cast<std::size_t>(i)], sites[static_cast<std::size_t>(x % bound)]);
  }
  std::uint32_t bits = 0;
  for (int k = 0; k < num_sites / 2; ++k) bits |= 1u << sites[static_cast<std::size_t>(k)];
  return SpinConfig(bits);
}

Estimate p_cross_estimate(int num_sites, int samples, std::uint64_t master_seed, int theta_over_pi) {
  if (samples < 1) throw ConfigError("p_cross needs at least one sample");
  if (num_sites % 2 != 0 || num_sites < 2 || num_sites > HalfFillingBasis::kMaxSites) {
    throw ConfigError("p_cross needs even N in [2, 16]");
  }
  std::size_t hits = 0;
  for (int i = 0; i < samples; ++i) {
    const std::uint64_t s = sector_seed(master_seed, static_cast<std::uint64_t>(i));
    const ChargeSector sector = sample_charge_sector(num_sites, s);
    const SpinConfig c = random_half_filling(num_sites, sector_seed(s, 1));
    if (component_crosses_center(krylov_component(c, num_sites, sector, theta_over_pi).bonds, num_sites)) ++hits;
  }
  const double p = static_cast<double>(hits) / samples;
  return {p, std::sqrt(p * (1.0 - p) / samples)};
}

double p_cross_exhaustive(const ChargeSector& sector, const HalfFillingBasis& basis, int theta_over_pi) {
  const int n = basis.num_sites();
  std::vector<int> verdict(basis.size(), -1);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (verdict[i] < 0) {
      const Component c = krylov_component(basis[i], n, sector, theta_over_pi);
      const int v = component_crosses_center(c.bonds, n) ? 1 : 0;
      for (SpinConfig s : c.states) verdict[basis.index_of(s)] = v;
    }
    hits += static_cast<std::size_t>(verdict[i]);
  }
  return static_cast<double>(hits) / static_cast<double>(basis.size());
}

std::vector<FragmentationRow> fragmentation_rows(const std::vector<KrylovDecomposition>& towers) {
  std::vector<FragmentationRow> rows;
  for (const auto& t : towers) {
    for (std::size_t i = 0; i < t.subspaces.size(); ++i) {
      const auto& s = t.subspaces[i];
      rows.push_back({t.tower_label, i, s.states.size(), s.active_regions.size(), s.crosses_center});
    }
  }
  return rows;
}

}  // namespace schwinger
