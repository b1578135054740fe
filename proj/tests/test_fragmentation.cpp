#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include "schwinger/entropy.hpp"
#include "schwinger/fragmentation.hpp"
#include "schwinger/spectral.hpp"

using namespace schwinger;

namespace {

ModelParams params(int n, double J = 1.0) { return ModelParams{n, J, 1.0, 0.0, std::numbers::pi}; }

// Hopping restricted to one active region, other sites frozen at `rest`.
struct RegionBlock {
  std::vector<std::uint32_t> local;  // region bit patterns
  std::uint32_t rest = 0;
  Eigen::MatrixXd hop;
};

RegionBlock region_block(const KrylovSubspace& sub, const std::vector<int>& region, const HalfFillingBasis& basis,
                         const ChargeSector& sector, double w) {
  std::uint32_t mask = 0;
  for (int s : region) mask |= 1u << (s - 1);
  RegionBlock rb;
  rb.rest = basis[sub.states.front()].bits() & ~mask;
  std::unordered_map<std::uint32_t, Eigen::Index> id;
  for (auto st : sub.states) {
    const std::uint32_t r = basis[st].bits() & mask;
    if (id.emplace(r, static_cast<Eigen::Index>(rb.local.size())).second) rb.local.push_back(r);
  }
  const auto d = static_cast<Eigen::Index>(rb.local.size());
  rb.hop = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const SpinConfig c(rb.local[static_cast<std::size_t>(i)] | rb.rest);
    for (int b = region.front(); b < region.back(); ++b) {
      if (!c.antialigned(b) || hop_energy_change(c, b, sector, 1) != 0) continue;
      const auto it = id.find(c.exchanged(b).bits() & mask);
      REQUIRE(it != id.end());
      rb.hop(i, it->second) = w;
    }
  }
  return rb;
}

Eigen::MatrixXd projected_hopping(const SectorHamiltonian& h, const std::vector<std::uint32_t>& order) {
  std::unordered_map<std::uint32_t, Eigen::Index> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<Eigen::Index>(i);
  const auto d = static_cast<Eigen::Index>(order.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (const Hop& hop : h.hops) {
    auto a = pos.find(hop.a);
    auto b = pos.find(hop.b);
    if (a == pos.end() || b == pos.end()) continue;
    m(a->second, b->second) += hop.amplitude;
    m(b->second, a->second) += hop.amplitude;
  }
  return m;
}

}  // namespace

TEST_CASE("resonance offset equals the brute-force energy change at N=6") {
  const int n = 6;
  const HalfFillingBasis basis(n);
  const auto p = params(n, 1.0);
  for (std::uint64_t k = 0; k < 100; ++k) {
    const auto sector = sample_charge_sector(n, sector_seed(2024, k));
    const auto h = build_hamiltonian(p, sector, basis);
    const auto& units = *h.diag_units;  // J/2 units
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const SpinConfig c = basis[i];
      for (int bond = 1; bond < n; ++bond) {
        if (!c.antialigned(bond)) {
          CHECK_THROWS_AS(hop_energy_change(c, bond, sector, 1), ConfigError);
          continue;
        }
        const auto j = basis.index_of(c.exchanged(bond));
        const std::int64_t brute = units[j] - units[i];
        CHECK(2 * hop_energy_change(c, bond, sector, 1) == brute);
        CHECK(std::abs(resonance_offset(c, bond, sector, 1)) * 2 == std::abs(brute));
        CHECK(is_resonant(c, bond, sector, std::numbers::pi) == (brute == 0));
      }
    }
  }
}

TEST_CASE("resonance offset at other integer theta") {
  const int n = 6;
  const HalfFillingBasis basis(n);
  for (int top : {0, 1}) {
    ModelParams p{n, 1.0, 1.0, 0.0, top * std::numbers::pi};
    for (std::uint64_t k = 0; k < 20; ++k) {
      const auto sector = sample_charge_sector(n, k);
      const auto h = build_hamiltonian(p, sector, basis);
      for (std::size_t i = 0; i < basis.size(); ++i) {
        for (int bond = 1; bond < n; ++bond) {
          if (!basis[i].antialigned(bond)) continue;
          const auto j = basis.index_of(basis[i].exchanged(bond));
          CHECK(2 * hop_energy_change(basis[i], bond, sector, top) == (*h.diag_units)[j] - (*h.diag_units)[i]);
          if (top == 0) CHECK_FALSE(is_resonant(basis[i], bond, sector, 0.0));
        }
      }
    }
  }
}

TEST_CASE("non-integer theta is never resonant") {
  const auto sector = make_sector({0, 0, 0, 0});
  CHECK_FALSE(is_resonant(SpinConfig::from_string("1010"), 1, sector, 0.5));
  CHECK_THROWS_AS(is_resonant(SpinConfig::from_string("1100"), 1, sector, 0.5), ConfigError);
}

TEST_CASE("towers and Krylov subspaces at N=10") {
  const int n = 10;
  const HalfFillingBasis basis(n);
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto sector = sample_charge_sector(n, sector_seed(5, k));
    const auto h = build_hamiltonian(params(n, 3.0), sector, basis);
    const auto towers = decompose_sector(h, basis);
    std::vector<int> seen(basis.size(), 0);
    for (const auto& t : towers) {
      std::vector<std::uint32_t> order;
      std::vector<std::size_t> starts;
      for (const auto& sub : t.subspaces) {
        starts.push_back(order.size());
        order.insert(order.end(), sub.states.begin(), sub.states.end());
        for (auto s : sub.states) {
          ++seen[s];
          CHECK((*h.diag_units)[s] == t.tower_label);
        }
        if (sub.factor_dims) {
          const auto prod = std::accumulate(sub.factor_dims->begin(), sub.factor_dims->end(), std::size_t{1},
                                            std::multiplies<>());
          CHECK(prod == sub.states.size());
        }
        if (sub.bonds.empty()) CHECK(sub.states.size() == 1);
      }
      starts.push_back(order.size());
      const Eigen::MatrixXd m = projected_hopping(h, order);
      for (std::size_t a = 0; a + 1 < starts.size(); ++a) {
        for (std::size_t b = 0; b + 1 < starts.size(); ++b) {
          if (a == b) continue;
          const auto blk = m.block(static_cast<Eigen::Index>(starts[a]), static_cast<Eigen::Index>(starts[b]),
                                   static_cast<Eigen::Index>(starts[a + 1] - starts[a]),
                                   static_cast<Eigen::Index>(starts[b + 1] - starts[b]));
          CHECK(blk.cwiseAbs().maxCoeff() == 0.0);
        }
      }
    }
    for (int c : seen) CHECK(c == 1);
  }
}

TEST_CASE("tower labels are at least 2J apart") {
  const HalfFillingBasis basis(8);
  const auto h = build_hamiltonian(params(8), sample_charge_sector(8, 3), basis);
  const auto towers = build_towers(h);
  std::int64_t prev = 0;
  bool first = true;
  for (const auto& [label, states] : towers) {
    if (!first) CHECK(label - prev >= 4);
    prev = label;
    first = false;
  }
}

TEST_CASE("frozen state forms its own subspace") {
  const int n = 8;
  const HalfFillingBasis basis(n);
  bool found = false;
  for (std::uint64_t k = 0; k < 20 && !found; ++k) {
    const auto sector = sample_charge_sector(n, k);
    const auto h = build_hamiltonian(params(n), sector, basis);
    for (const auto& t : decompose_sector(h, basis)) {
      for (const auto& sub : t.subspaces) {
        if (sub.states.size() == 1) {
          CHECK(sub.active_regions.empty());
          CHECK_FALSE(sub.crosses_center);
          CHECK(sub.factor_dims.has_value());
          found = true;
        }
      }
    }
  }
  CHECK(found);
}

TEST_CASE("independent regions: spectrum is the set of pairwise sums") {
  const int n = 12;
  const HalfFillingBasis basis(n);
  int checked = 0;
  for (std::uint64_t k = 0; k < 40 && checked < 5; ++k) {
    const auto sector = sample_charge_sector(n, sector_seed(77, k));
    const auto h = build_hamiltonian(params(n), sector, basis);
    for (const auto& t : decompose_sector(h, basis)) {
      for (const auto& sub : t.subspaces) {
        if (sub.active_regions.size() != 2 || !sub.factor_dims || sub.states.size() < 4) continue;
        const auto r1 = region_block(sub, sub.active_regions[0], basis, sector, 1.0);
        const auto r2 = region_block(sub, sub.active_regions[1], basis, sector, 1.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e1(r1.hop);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e2(r2.hop);
        std::vector<double> sums;
        for (Eigen::Index a = 0; a < e1.eigenvalues().size(); ++a) {
          for (Eigen::Index b = 0; b < e2.eigenvalues().size(); ++b) sums.push_back(e1.eigenvalues()[a] + e2.eigenvalues()[b]);
        }
        std::sort(sums.begin(), sums.end());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(projected_hopping(h, sub.states));
        REQUIRE(sums.size() == static_cast<std::size_t>(full.eigenvalues().size()));
        for (std::size_t i = 0; i < sums.size(); ++i) CHECK(full.eigenvalues()[static_cast<Eigen::Index>(i)] == doctest::Approx(sums[i]).epsilon(1e-10));
        ++checked;
      }
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("hops in one region leave other regions' resonances unchanged") {
  for (int n : {6, 8}) {
    const HalfFillingBasis basis(n);
    for (std::uint64_t k = 0; k < 30; ++k) {
      const auto sector = sample_charge_sector(n, sector_seed(8, k));
      const auto h = build_hamiltonian(params(n), sector, basis);
      for (const auto& t : decompose_sector(h, basis)) {
        for (const auto& sub : t.subspaces) {
          if (sub.active_regions.size() < 2) continue;
          for (auto s : sub.states) {
            const SpinConfig c = basis[s];
            for (std::size_t r = 0; r < sub.active_regions.size(); ++r) {
              const auto& region = sub.active_regions[r];
              for (int b = region.front(); b < region.back(); ++b) {
                if (!c.antialigned(b) || hop_energy_change(c, b, sector, 1) != 0) continue;
                const SpinConfig moved = c.exchanged(b);
                for (std::size_t o = 0; o < sub.active_regions.size(); ++o) {
                  if (o == r) continue;
                  const auto& other = sub.active_regions[o];
                  for (int ob = other.front(); ob < other.back(); ++ob) {
                    const bool before = c.antialigned(ob) && hop_energy_change(c, ob, sector, 1) == 0;
                    const bool after = moved.antialigned(ob) && hop_energy_change(moved, ob, sector, 1) == 0;
                    CHECK(before == after);
                  }
                }
              }
            }
          }
        }
      }
    }
  }
}

TEST_CASE("single-configuration components agree with the tower BFS") {
  const int n = 10;
  const HalfFillingBasis basis(n);
  const auto sector = sample_charge_sector(n, 12);
  const auto h = build_hamiltonian(params(n), sector, basis);
  for (const auto& t : decompose_sector(h, basis)) {
    for (const auto& sub : t.subspaces) {
      const auto c = krylov_component(basis[sub.states.front()], n, sector, 1);
      REQUIRE(c.states.size() == sub.states.size());
      for (std::size_t i = 0; i < c.states.size(); ++i) CHECK(basis.index_of(c.states[i]) == sub.states[i]);
      CHECK(c.bonds == sub.bonds);
    }
  }
}

TEST_CASE("p_cross: exhaustive count at N=6 and frozen limit") {
  const int n = 6;
  const HalfFillingBasis basis(n);
  const auto zero = make_sector({0, 0, 0, 0, 0, 0});
  // oracle: union-find on equal-label hops, then check use of the central bond
  const auto h = build_hamiltonian(params(n), zero, basis);
  std::vector<std::size_t> parent(basis.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Hop& hop : h.hops) {
    if ((*h.diag_units)[hop.a] == (*h.diag_units)[hop.b]) parent[find(hop.a)] = find(hop.b);
  }
  std::vector<int> crosses(basis.size(), 0);
  for (const Hop& hop : h.hops) {
    if (hop.bond == n / 2 && (*h.diag_units)[hop.a] == (*h.diag_units)[hop.b]) crosses[find(hop.a)] = 1;
  }
  double count = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) count += crosses[find(i)];
  CHECK(p_cross_exhaustive(zero, basis) == doctest::Approx(count / basis.size()));
  // the vacuum itself hops resonantly across the centre in the neutral sector
  CHECK(component_crosses_center(krylov_component(vacuum_config(n), n, zero, 1).bonds, n));

  CHECK(p_cross_exhaustive(zero, basis, 0) == 0.0);
  CHECK(p_cross_estimate(8, 1000, 1, 0).value == 0.0);
}

TEST_CASE("p_cross decays as N^-1/2") {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> wts;
  for (int n = 8; n <= 16; n += 2) {
    const auto e = p_cross_estimate(n, 20000, 31);
    CHECK(e.stderr_ > 0.0);
    x.push_back(std::log(n));
    y.push_back(std::log(e.value));
    wts.push_back(1.0);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double m = static_cast<double>(x.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  CHECK(slope == doctest::Approx(-0.5).epsilon(0.3));
}

TEST_CASE("strong-coupling eigenstate entropy is p_cross ln 2 at N=12") {
  // J -> infinity: eigenstates are products of active-region eigenstates;
  // only the region straddling the cut contributes.
  const int n = 12;
  const HalfFillingBasis basis(n);
  const Bipartition bp(basis, n / 2);
  double s_mean = 0.0;
  double p_mean = 0.0;
  const int sectors = 40;
  for (int k = 0; k < sectors; ++k) {
    const auto sector = sample_charge_sector(n, sector_seed(9, static_cast<std::uint64_t>(k)));
    const auto h = build_hamiltonian(params(n), sector, basis);
    double total = 0.0;
    for (const auto& t : decompose_sector(h, basis)) {
      for (const auto& sub : t.subspaces) {
        if (!sub.crosses_center) continue;
        REQUIRE(sub.factor_dims.has_value());
        const std::vector<int>* straddle = nullptr;
        for (const auto& r : sub.active_regions) {
          if (r.front() <= n / 2 && r.back() >= n / 2 + 1) straddle = &r;
        }
        REQUIRE(straddle != nullptr);
        const auto rb = region_block(sub, *straddle, basis, sector, 1.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rb.hop);
        double acc = 0.0;
        for (Eigen::Index e = 0; e < es.eigenvalues().size(); ++e) {
          Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
          for (std::size_t i = 0; i < rb.local.size(); ++i) {
            v[static_cast<Eigen::Index>(basis.index_of(SpinConfig(rb.local[i] | rb.rest)))] = es.eigenvectors()(static_cast<Eigen::Index>(i), e);
          }
          acc += entropy_decomposition(v, bp).S_E;
        }
        total += acc / static_cast<double>(rb.local.size()) * static_cast<double>(sub.states.size());
      }
    }
    s_mean += total / static_cast<double>(basis.size()) / sectors;
    p_mean += p_cross_exhaustive(sector, basis) / sectors;
  }
  CHECK(s_mean == doctest::Approx(p_mean * std::log(2.0)).epsilon(0.10));
}

TEST_CASE("fragmentation rows") {
  const HalfFillingBasis basis(6);
  const auto h = build_hamiltonian(params(6), make_sector({0, 0, 0, 0, 0, 0}), basis);
  const auto towers = decompose_sector(h, basis);
  const auto rows = fragmentation_rows(towers);
  std::size_t total = 0;
  for (const auto& r : rows) total += r.dimension;
  CHECK(total == basis.size());
  CHECK_THROWS_AS(build_towers(build_hamiltonian(ModelParams{6, 1.0, 1.0, 0.3, std::numbers::pi},
                                                 make_sector({0, 0, 0, 0, 0, 0}), basis)),
                  ConfigError);
}
