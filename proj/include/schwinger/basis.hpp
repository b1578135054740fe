#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace schwinger {

/// Raised for invalid user-facing parameters (odd N, mismatched sizes, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Spin configuration packed into a word. Site j (1-based, left to right)
/// lives at bit j-1; a set bit means sigma^z_j = +1 ("particle").
class SpinConfig {
 public:
  using word_type = std::uint32_t;

  constexpr SpinConfig() = default;
  constexpr explicit SpinConfig(word_type bits) : bits_(bits) {}

  /// Parses a left-to-right string such as "1010".
  static SpinConfig from_string(const std::string& sites);

  constexpr word_type bits() const { return bits_; }

  /// Occupation of the 1-based site j.
  constexpr bool occupied(int site) const { return (bits_ >> (site - 1)) & 1u; }

  /// sigma^z eigenvalue (+1 or -1) of the 1-based site j.
  constexpr int sz(int site) const { return occupied(site) ? 1 : -1; }

  /// Exchange the spins on sites (bond, bond+1).
  constexpr SpinConfig exchanged(int bond) const {
    return SpinConfig(bits_ ^ (word_type{3} << (bond - 1)));
  }

  /// True when the spins on (bond, bond+1) differ.
  constexpr bool antialigned(int bond) const {
    return occupied(bond) != occupied(bond + 1);
  }

  int popcount() const;
  std::string to_string(int num_sites) const;

  friend constexpr bool operator==(SpinConfig, SpinConfig) = default;
  friend constexpr auto operator<=>(SpinConfig, SpinConfig) = default;

 private:
  word_type bits_ = 0;
};

/// The Neel / fermionic vacuum |1010...10>: particles on odd sites.
SpinConfig vacuum_config(int num_sites);

/// All zero-magnetization configurations of N sites, sorted by bit word.
class HalfFillingBasis {
 public:
  static constexpr int kMaxSites = 16;

  explicit HalfFillingBasis(int num_sites);

  int num_sites() const { return num_sites_; }
  std::size_t size() const { return states_.size(); }
  const std::vector<SpinConfig>& states() const { return states_; }
  SpinConfig operator[](std::size_t i) const { return states_[i]; }

  /// Dense index of a half-filling configuration; throws std::out_of_range
  /// for words outside the basis.
  std::size_t index_of(SpinConfig config) const;
  bool contains(SpinConfig config) const;

 private:
  int num_sites_;
  std::vector<SpinConfig> states_;
  // Direct-address table over all 2^N words; kAbsent marks non-members.
  std::vector<std::uint32_t> lookup_;
  static constexpr std::uint32_t kAbsent = 0xffffffffu;
};

HalfFillingBasis enumerate_basis(int num_sites);

/// One background-charge configuration {q_j}, q_j in {-1, 0, +1}, sum zero.
struct ChargeSector {
  std::vector<int> q;
  std::uint64_t seed = 0;

  int num_sites() const { return static_cast<int>(q.size()); }
  /// Prefix sum Q_j = sum_{i <= j} q_i for 1-based j (Q_0 = 0).
  int prefix(int j) const;
};

/// Per-sector seed derived from (master_seed, index) with a SplitMix64 mix.
std::uint64_t sector_seed(std::uint64_t master_seed, std::uint64_t index);

/// Draws one sector uniformly from {-1,0,1}^N conditioned on zero sum
/// (rejection sampling), fully determined by `seed`.
ChargeSector sample_charge_sector(int num_sites, std::uint64_t seed);

std::vector<ChargeSector> sample_charge_sectors(int num_sites, int count,
                                                std::uint64_t master_seed);

/// Every zero-sum sector of N sites, in lexicographic order of q.
std::vector<ChargeSector> enumerate_charge_sectors(int num_sites);

ChargeSector make_sector(std::vector<int> q, std::uint64_t seed = 0);

/// "seed,q1,q2,...,qN" (one line, no newline).
std::string format_sector(const ChargeSector& sector);
ChargeSector parse_sector(const std::string& line);

void write_sectors(std::ostream& out, std::span<const ChargeSector> sectors);
std::vector<ChargeSector> read_sectors(std::istream& in);

}  // namespace schwinger
