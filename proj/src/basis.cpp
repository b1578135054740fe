#include "schwinger/basis.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace schwinger {

SpinConfig SpinConfig::from_string(const std::string& sites) {
  if (sites.size() > 32) throw ConfigError("configuration string longer than 32 sites");
  word_type bits = 0;
  for (std::size_t j = 0; j < sites.size(); ++j) {
    if (sites[j] == '1') {
      bits |= word_type{1} << j;
    } else if (sites[j] != '0') {
      throw ConfigError("configuration string must contain only 0 and 1: " + sites);
    }
  }
  return SpinConfig(bits);
}

int SpinConfig::popcount() const { return std::popcount(bits_); }

std::string SpinConfig::to_string(int num_sites) const {
  std::string s(static_cast<std::size_t>(num_sites), '0');
  for (int j = 1; j <= num_sites; ++j) {
    if (occupied(j)) s[static_cast<std::size_t>(j - 1)] = '1';
  }
  return s;
}

SpinConfig vacuum_config(int num_sites) {
  SpinConfig::word_type bits = 0;
  for (int j = 1; j <= num_sites; j += 2) bits |= SpinConfig::word_type{1} << (j - 1);
  return SpinConfig(bits);
}

HalfFillingBasis::HalfFillingBasis(int num_sites) : num_sites_(num_sites) {
  if (num_sites % 2 != 0 || num_sites < 2 || num_sites > kMaxSites) {
    throw ConfigError("number of sites must be even and in [2, 16], got " +
                      std::to_string(num_sites));
  }
  const std::uint32_t words = 1u << num_sites;
  lookup_.assign(words, kAbsent);
  for (std::uint32_t w = 0; w < words; ++w) {
    if (std::popcount(w) == num_sites / 2) {
      lookup_[w] = static_cast<std::uint32_t>(states_.size());
      states_.emplace_back(w);
    }
  }
}

std::size_t HalfFillingBasis::index_of(SpinConfig config) const {
  if (config.bits() >= lookup_.size() || lookup_[config.bits()] == kAbsent) {
    throw std::out_of_range("configuration " + config.to_string(num_sites_) +
                            " is not in the half-filling basis");
  }
  return lookup_[config.bits()];
}

bool HalfFillingBasis::contains(SpinConfig config) const {
  return config.bits() < lookup_.size() && lookup_[config.bits()] != kAbsent;
}

HalfFillingBasis enumerate_basis(int num_sites) { return HalfFillingBasis(num_sites); }

int ChargeSector::prefix(int j) const {
  return std::accumulate(q.begin(), q.begin() + j, 0);
}

std::uint64_t sector_seed(std::uint64_t master_seed, std::uint64_t index) {
  // SplitMix64 finalizer applied to a golden-ratio stride of the index.
  std::uint64_t z = master_seed + (index + 1) * 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

namespace {

// Unbiased draw from {-1, 0, +1}. std::uniform_int_distribution is not
// specified bit-for-bit across standard libraries, so sectors would not
// reproduce between toolchains.
int draw_ternary(std::mt19937_64& rng) {
  constexpr std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                  std::numeric_limits<std::uint64_t>::max() % 3;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<int>(x % 3) - 1;
}

}  // namespace

ChargeSector sample_charge_sector(int num_sites, std::uint64_t seed) {
  if (num_sites < 1) throw ConfigError("sector needs at least one site");
  std::mt19937_64 rng(seed);
  ChargeSector sector;
  sector.seed = seed;
  sector.q.resize(static_cast<std::size_t>(num_sites));
  for (;;) {
    for (auto& qj : sector.q) qj = draw_ternary(rng);
    if (std::accumulate(sector.q.begin(), sector.q.end(), 0) == 0) return sector;
  }
}

std::vector<ChargeSector> sample_charge_sectors(int num_sites, int count,
                                                std::uint64_t master_seed) {
  if (count < 1) throw ConfigError("sector count must be at least 1");
  std::vector<ChargeSector> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back(sample_charge_sector(num_sites, sector_seed(master_seed, static_cast<std::uint64_t>(i))));
  }
  return out;
}

std::vector<ChargeSector> enumerate_charge_sectors(int num_sites) {
  std::vector<ChargeSector> out;
  std::vector<int> q(static_cast<std::size_t>(num_sites), -1);
  for (;;) {
    if (std::accumulate(q.begin(), q.end(), 0) == 0) out.push_back(make_sector(q, out.size()));
    // odometer increment, last site fastest
    int pos = num_sites - 1;
    while (pos >= 0 && q[static_cast<std::size_t>(pos)] == 1) {
      q[static_cast<std::size_t>(pos)] = -1;
      --pos;
    }
    if (pos < 0) break;
    ++q[static_cast<std::size_t>(pos)];
  }
  return out;
}

ChargeSector make_sector(std::vector<int> q, std::uint64_t seed) {
  for (int qj : q) {
    if (qj < -1 || qj > 1) throw ConfigError("background charges must lie in {-1, 0, 1}");
  }
  if (std::accumulate(q.begin(), q.end(), 0) != 0) {
    throw ConfigError("background charges must sum to zero");
  }
  return ChargeSector{std::move(q), seed};
}

std::string format_sector(const ChargeSector& sector) {
  std::ostringstream os;
  os << sector.seed;
  for (int qj : sector.q) os << ',' << qj;
  return os.str();
}

ChargeSector parse_sector(const std::string& line) {
  std::istringstream is(line);
  std::string field;
  if (!std::getline(is, field, ',')) throw ConfigError("empty sector line");
  std::uint64_t seed = 0;
  try {
    seed = std::stoull(field);
  } catch (const std::exception&) {
    throw ConfigError("bad sector seed: " + field);
  }
  std::vector<int> q;
  while (std::getline(is, field, ',')) {
    try {
      q.push_back(std::stoi(field));
    } catch (const std::exception&) {
      throw ConfigError("bad background charge: " + field);
    }
  }
  return make_sector(std::move(q), seed);
}

void write_sectors(std::ostream& out, std::span<const ChargeSector> sectors) {
  for (const auto& s : sectors) out << format_sector(s) << '\n';
}

std::vector<ChargeSector> read_sectors(std::istream& in) {
  std::vector<ChargeSector> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    out.push_back(parse_sector(line));
  }
  return out;
}

}  // namespace schwinger
