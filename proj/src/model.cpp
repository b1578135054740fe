#include "schwinger/model.hpp"

#include <cmath>
#include <random>
#include <string>

namespace schwinger {

void ModelParams::validate() const {
  if (!(w > 0.0)) throw ConfigError("hopping w must be positive");
  if (!(J >= 0.0)) throw ConfigError("coupling J must be non-negative");
  if (!(theta >= 0.0 && theta < 2.0 * std::numbers::pi)) {
    throw ConfigError("theta must lie in [0, 2 pi)");
  }
}

std::optional<int> ModelParams::theta_over_pi() const {
  const double r = theta / std::numbers::pi;
  const double n = std::round(r);
  if (std::abs(r - n) > 1e-12) return std::nullopt;
  return static_cast<int>(n);
}

namespace {

int ceil_half(int x) { return (x + 1) / 2; }

void check_dimensions(int num_sites, const ChargeSector& sector, const HalfFillingBasis& basis) {
  if (basis.num_sites() != num_sites || sector.num_sites() != num_sites) {
    throw ConfigError("dimension mismatch: params N=" + std::to_string(num_sites) +
                      ", basis N=" + std::to_string(basis.num_sites()) +
                      ", sector N=" + std::to_string(sector.num_sites()));
  }
}

void fill_hops(SectorHamiltonian& h, const HalfFillingBasis& basis, double amplitude) {
  const int n = basis.num_sites();
  for (std::size_t a = 0; a < basis.size(); ++a) {
    const SpinConfig s = basis[a];
    for (int bond = 1; bond < n; ++bond) {
      // store each pair once, from the |..10..> side (site bond occupied)
      if (s.occupied(bond) && !s.occupied(bond + 1)) {
        const auto b = basis.index_of(s.exchanged(bond));
        h.hops.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), bond, amplitude});
      }
    }
  }
}

// Real-valued field term including mass, used when towers are not integral.
double field_energy(SpinConfig s, const ChargeSector& sector, const ModelParams& params) {
  double e = 0.0;
  for (int k = 1; k <= params.num_sites; ++k) e += local_field(k, sector, params) * s.sz(k);
  return e;
}

}  // namespace

double local_field(int site, const ChargeSector& sector, const ModelParams& params) {
  const int n = params.num_sites;
  // sum_{j=k}^{N-1} Q_j with Q_j the prefix charge
  long twice_sum = 0;
  int prefix = sector.prefix(site - 1);
  for (int j = site; j <= n - 1; ++j) {
    prefix += sector.q[static_cast<std::size_t>(j - 1)];
    twice_sum += 2 * prefix;
  }
  const double h = 0.5 * params.J *
                   ((n - site) * params.theta / std::numbers::pi - ceil_half(n - site) +
                    static_cast<double>(twice_sum));
  const double mass = 0.5 * params.m * ((site % 2 == 0) ? 1.0 : -1.0);
  return h + mass;
}

std::int64_t local_field_units(int site, const ChargeSector& sector, int theta_over_pi) {
  const int n = sector.num_sites();
  std::int64_t twice_sum = 0;
  int prefix = sector.prefix(site - 1);
  for (int j = site; j <= n - 1; ++j) {
    prefix += sector.q[static_cast<std::size_t>(j - 1)];
    twice_sum += 2 * prefix;
  }
  return static_cast<std::int64_t>(n - site) * theta_over_pi - ceil_half(n - site) + twice_sum;
}

std::int64_t coulomb_units(SpinConfig config, int num_sites) {
  std::int64_t total = 0;
  std::int64_t left = config.sz(1);  // sum_{j<k} s_j
  for (int k = 2; k <= num_sites - 1; ++k) {
    total += static_cast<std::int64_t>(num_sites - k) * config.sz(k) * left;
    left += config.sz(k);
  }
  return total;
}

std::int64_t field_units(SpinConfig config, const ChargeSector& sector, int theta_over_pi) {
  std::int64_t total = 0;
  for (int k = 1; k <= sector.num_sites(); ++k) {
    total += local_field_units(k, sector, theta_over_pi) * config.sz(k);
  }
  return total;
}

SectorHamiltonian build_scaled_hamiltonian(const ModelParams& params, const ChargeSector& sector,
                                           const HalfFillingBasis& basis, double J_zz, double J_q) {
  params.validate();
  check_dimensions(params.num_sites, sector, basis);
  SectorHamiltonian h;
  h.num_sites = params.num_sites;
  h.params = params;
  h.sector = sector;
  h.diag.resize(static_cast<Eigen::Index>(basis.size()));

  const auto top = params.theta_over_pi();
  const bool integral = top.has_value() && params.m == 0.0 && J_zz == J_q;
  std::vector<std::int64_t> units;
  if (integral) units.resize(basis.size());

  // Field units depend only on (site, sector): tabulate once.
  std::vector<std::int64_t> field_table;
  if (top) {
    for (int k = 1; k <= params.num_sites; ++k) field_table.push_back(local_field_units(k, sector, *top));
  }

  const double half_j = 0.5 * params.J;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const SpinConfig s = basis[i];
    const std::int64_t zz = coulomb_units(s, params.num_sites);
    double field = 0.0;
    std::int64_t f_units = 0;
    if (top) {
      for (int k = 1; k <= params.num_sites; ++k) f_units += field_table[static_cast<std::size_t>(k - 1)] * s.sz(k);
      field = half_j * static_cast<double>(f_units);
      if (params.m != 0.0) {
        for (int k = 1; k <= params.num_sites; ++k) field += 0.5 * params.m * ((k % 2 == 0) ? 1.0 : -1.0) * s.sz(k);
      }
    } else {
      field = field_energy(s, sector, params);
    }
    if (integral) {
      units[i] = zz + f_units;
      h.diag[static_cast<Eigen::Index>(i)] = half_j * J_zz * static_cast<double>(units[i]);
    } else {
      h.diag[static_cast<Eigen::Index>(i)] = J_zz * half_j * static_cast<double>(zz) + J_q * field;
    }
  }
  if (integral) {
    h.diag_units = std::move(units);
    h.unit_energy = half_j * J_zz;
  }
  fill_hops(h, basis, params.w);
  return h;
}

SectorHamiltonian build_hamiltonian(const ModelParams& params, const ChargeSector& sector,
                                    const HalfFillingBasis& basis) {
  return build_scaled_hamiltonian(params, sector, basis, 1.0, 1.0);
}

std::vector<double> draw_xxz_fields(const XXZParams& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> fields(static_cast<std::size_t>(params.num_sites));
  for (auto& f : fields) {
    if (params.disorder == DisorderKind::uniform) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
      f = params.W * (2.0 * u - 1.0);
    } else {
      constexpr std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                      std::numeric_limits<std::uint64_t>::max() % 3;
      std::uint64_t x;
      do {
        x = rng();
      } while (x >= limit);
      f = params.W * static_cast<double>(static_cast<int>(x % 3) - 1);
    }
  }
  return fields;
}

SectorHamiltonian build_xxz(const XXZParams& params, std::uint64_t seed,
                            const HalfFillingBasis& basis) {
  if (params.num_sites % 2 != 0) throw ConfigError("XXZ chain needs an even number of sites");
  if (params.W < 0.0) throw ConfigError("disorder strength W must be non-negative");
  if (basis.num_sites() != params.num_sites) throw ConfigError("dimension mismatch between XXZ params and basis");
  SectorHamiltonian h;
  h.num_sites = params.num_sites;
  h.params.num_sites = params.num_sites;
  h.params.J = params.J_z;
  h.params.w = params.J_xy;
  h.sector.q.assign(static_cast<std::size_t>(params.num_sites), 0);
  h.sector.seed = seed;
  h.xxz_fields = draw_xxz_fields(params, seed);
  h.diag.resize(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const SpinConfig s = basis[i];
    double e = 0.0;
    for (int j = 1; j < params.num_sites; ++j) e += 0.5 * params.J_z * s.sz(j) * s.sz(j + 1);
    for (int j = 1; j <= params.num_sites; ++j) e += h.xxz_fields[static_cast<std::size_t>(j - 1)] * s.sz(j);
    h.diag[static_cast<Eigen::Index>(i)] = e;
  }
  fill_hops(h, basis, params.J_xy);
  return h;
}

double vacuum_energy(const ModelParams& params, const ChargeSector& sector) {
  const int n = params.num_sites;
  const int half = n / 2;
  double charge_term = 0.0;
  for (int k = 1; k <= n - 1; ++k) charge_term += ceil_half(n - k) * sector.q[static_cast<std::size_t>(k - 1)];
  const double pairs = 0.5 * half * (half - 1);
  const double at_pi = params.J * (charge_term - pairs);
  const double theta_shift = 0.5 * params.J * (params.theta / std::numbers::pi - 1.0) * half;
  return at_pi + theta_shift - 0.5 * params.m * n;
}

Eigen::MatrixXd SectorHamiltonian::dense() const {
  Eigen::MatrixXd m = dense_hopping();
  m.diagonal() += diag;
  return m;
}

Eigen::MatrixXd SectorHamiltonian::dense_hopping() const {
  const auto d = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (const Hop& hop : hops) {
    m(hop.a, hop.b) += hop.amplitude;
    m(hop.b, hop.a) += hop.amplitude;
  }
  return m;
}

void SectorHamiltonian::apply(const Eigen::Ref<const Eigen::VectorXcd>& x,
                              Eigen::Ref<Eigen::VectorXcd> y) const {
  y = diag.cast<std::complex<double>>().cwiseProduct(x);
  for (const Hop& hop : hops) {
    y[hop.a] += hop.amplitude * x[hop.b];
    y[hop.b] += hop.amplitude * x[hop.a];
  }
}

void SectorHamiltonian::apply(const Eigen::Ref<const Eigen::VectorXd>& x,
                              Eigen::Ref<Eigen::VectorXd> y) const {
  y = diag.cwiseProduct(x);
  for (const Hop& hop : hops) {
    y[hop.a] += hop.amplitude * x[hop.b];
    y[hop.b] += hop.amplitude * x[hop.a];
  }
}

Eigen::VectorXd staggered_magnetization_diagonal(const HalfFillingBasis& basis) {
  const int n = basis.num_sites();
  Eigen::VectorXd mu(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    int total = 0;
    for (int j = 1; j <= n; ++j) total += ((j % 2 == 0) ? 1 : -1) * basis[i].sz(j);
    mu[static_cast<Eigen::Index>(i)] = static_cast<double>(total) / n;
  }
  return mu;
}

double staggered_magnetization(const Eigen::Ref<const Eigen::VectorXcd>& state,
                               const HalfFillingBasis& basis) {
  return staggered_magnetization_diagonal(basis).dot(state.cwiseAbs2());
}

double staggered_magnetization(const Eigen::Ref<const Eigen::VectorXd>& state,
                               const HalfFillingBasis& basis) {
  return staggered_magnetization_diagonal(basis).dot(state.cwiseAbs2());
}

}  // namespace schwinger
