#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "schwinger/model.hpp"

using namespace schwinger;

namespace {

// Dense 2^N construction from Pauli matrices; independent of the basis code.
struct PauliOracle {
  int n;
  explicit PauliOracle(int sites) : n(sites) {}

  std::size_t dim() const { return std::size_t{1} << n; }
  double sz(std::uint32_t w, int site) const { return ((w >> (site - 1)) & 1u) ? 1.0 : -1.0; }

  double h_k(int k, const std::vector<int>& q, double J, double theta) const {
    double nested = 0.0;
    for (int j = k; j <= n - 1; ++j) {
      for (int i = 1; i <= j; ++i) nested += q[static_cast<std::size_t>(i - 1)];
    }
    return 0.5 * J * ((n - k) * theta / std::numbers::pi - std::ceil((n - k) / 2.0) + 2.0 * nested);
  }

  Eigen::MatrixXd full(const std::vector<int>& q, double J, double w, double m, double theta) const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(dim()));
    for (std::uint32_t s = 0; s < dim(); ++s) {
      double d = 0.0;
      for (int j = 1; j <= n - 2; ++j) {
        for (int k = j + 1; k <= n - 1; ++k) d += 0.5 * J * (n - k) * sz(s, j) * sz(s, k);
      }
      for (int k = 1; k <= n; ++k) d += (h_k(k, q, J, theta) + 0.5 * m * std::pow(-1.0, k)) * sz(s, k);
      h(s, s) = d;
      for (int j = 1; j <= n - 1; ++j) {
        // sigma+_j sigma-_{j+1}: raise j, lower j+1
        const std::uint32_t bj = 1u << (j - 1);
        const std::uint32_t bk = 1u << j;
        if (!(s & bj) && (s & bk)) {
          const std::uint32_t t = (s | bj) & ~bk;
          h(t, s) += w;
          h(s, t) += w;
        }
      }
    }
    return h;
  }

  Eigen::MatrixXd projected(const HalfFillingBasis& basis, const Eigen::MatrixXd& full_h) const {
    const auto d = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd p(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) p(a, b) = full_h(basis[a].bits(), basis[b].bits());
    }
    return p;
  }
};

}  // namespace

TEST_CASE("local field examples") {
  ModelParams p{4, 1.0, 1.0, 0.0, std::numbers::pi};
  const auto zero = make_sector({0, 0, 0, 0});
  CHECK(local_field(4, zero, p) == 0.0);
  CHECK(local_field(1, zero, p) == doctest::Approx(0.5));
  p.J = 3.0;
  CHECK(local_field(1, zero, p) == doctest::Approx(1.5));

  const auto q = make_sector({1, -1, 0, 0});
  const PauliOracle oracle(4);
  for (int k = 1; k <= 4; ++k) {
    CHECK(local_field(k, q, p) == doctest::Approx(oracle.h_k(k, q.q, p.J, p.theta)).epsilon(1e-14));
    // integer form: twice the field in units of J
    CHECK(static_cast<double>(local_field_units(k, q, 1)) == oracle.h_k(k, q.q, 2.0, std::numbers::pi));
  }
}

TEST_CASE("Hamiltonian equals the Pauli-matrix construction") {
  std::mt19937_64 rng(5);
  for (int n : {2, 4, 6, 8}) {
    const HalfFillingBasis basis(n);
    const PauliOracle oracle(n);
    for (int trial = 0; trial < 4; ++trial) {
      const auto sector = sample_charge_sector(n, rng());
      std::uniform_real_distribution<double> u(0.1, 3.0);
      ModelParams p{n, u(rng), u(rng), 0.0, std::numbers::pi};
      if (trial == 1) p.m = 0.7;
      if (trial == 2) p.theta = 0.3;
      if (trial == 3) p.theta = 0.0;
      const auto h = build_hamiltonian(p, sector, basis);
      const Eigen::MatrixXd expect = oracle.projected(basis, oracle.full(sector.q, p.J, p.w, p.m, p.theta));
      CHECK((h.dense() - expect).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(h.diag_units.has_value() == (trial == 0 || trial == 3));
    }
  }
}

TEST_CASE("N=2 matrix is a single hop") {
  const HalfFillingBasis basis(2);
  ModelParams p{2, 1.0, 0.7, 0.0, std::numbers::pi};
  const auto h = build_hamiltonian(p, make_sector({0, 0}), basis);
  REQUIRE(h.hops.size() == 1);
  const auto m = h.dense();
  CHECK(m(0, 1) == 0.7);
  CHECK(m(1, 0) == 0.7);
}

TEST_CASE("vacuum diagonal energy at N=4") {
  const HalfFillingBasis basis(4);
  ModelParams p{4, 2.0, 1.0, 0.0, std::numbers::pi};
  const auto sector = make_sector({0, 0, 0, 0});
  const auto h = build_hamiltonian(p, sector, basis);
  const auto vac = basis.index_of(vacuum_config(4));
  // term by term: H_ZZ gives (J/2)(2*(-1) + 1*(+1) + 1*(-1)) = -J, h = (J/2, 0, J/2, 0)
  CHECK(h.diag[static_cast<Eigen::Index>(vac)] == doctest::Approx(-p.J));
  CHECK(vacuum_energy(p, sector) == doctest::Approx(-p.J));
}

TEST_CASE("vacuum energy closed form matches the diagonal") {
  std::mt19937_64 rng(11);
  for (int n = 2; n <= 12; n += 2) {
    const HalfFillingBasis basis(n);
    for (int trial = 0; trial < 20; ++trial) {
      ModelParams p{n, 0.5 + trial * 0.3, 1.0, 0.0, std::numbers::pi};
      if (trial % 3 == 1) p.m = 0.4;
      if (trial % 4 == 2) p.theta = 1.1;
      const auto sector = sample_charge_sector(n, rng());
      const auto h = build_hamiltonian(p, sector, basis);
      CHECK(h.diag[static_cast<Eigen::Index>(basis.index_of(vacuum_config(n)))] ==
            doctest::Approx(vacuum_energy(p, sector)).epsilon(1e-12));
    }
  }
}

TEST_CASE("ZZ coefficient between sites 1 and 2 at N=4 is J") {
  // flipping site 1 changes only couplings to sites 2, 3 (k <= N-1)
  const int n = 4;
  auto e = [&](const char* s) { return coulomb_units(SpinConfig::from_string(s), n); };
  // (J/2)(N-k) with k=2 equals J, i.e. 2 units of J/2
  const auto delta_12 = (e("1100") - e("0100")) - (e("1000") - e("0000"));
  // d/d s1 d/d s2 of sum c_jk s_j s_k is 4 c_12 with s in {-1,+1}
  CHECK(delta_12 == 4 * 2);
}

TEST_CASE("scaled Hamiltonian") {
  const int n = 6;
  const HalfFillingBasis basis(n);
  const auto sector = sample_charge_sector(n, 17);
  ModelParams p{n, 2.5, 1.0, 0.0, std::numbers::pi};
  const auto full = build_hamiltonian(p, sector, basis);
  const auto same = build_scaled_hamiltonian(p, sector, basis, 1.0, 1.0);
  CHECK((full.dense() - same.dense()).cwiseAbs().maxCoeff() == 0.0);

  const auto xy = build_scaled_hamiltonian(p, sector, basis, 0.0, 0.0);
  CHECK(xy.diag.cwiseAbs().maxCoeff() == 0.0);
  CHECK((xy.dense() - full.dense_hopping()).cwiseAbs().maxCoeff() == 0.0);

  const auto mixed = build_scaled_hamiltonian(p, sector, basis, 0.1, 3.0);
  const auto zz_only = build_scaled_hamiltonian(p, sector, basis, 1.0, 0.0);
  const auto q_only = build_scaled_hamiltonian(p, sector, basis, 0.0, 1.0);
  const Eigen::VectorXd expect = 0.1 * zz_only.diag + 3.0 * q_only.diag;
  CHECK((mixed.diag - expect).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_FALSE(mixed.diag_units.has_value());
}

TEST_CASE("structural invariants") {
  std::mt19937_64 rng(3);
  for (int n : {4, 8, 10}) {
    const HalfFillingBasis basis(n);
    for (int trial = 0; trial < 5; ++trial) {
      const auto sector = sample_charge_sector(n, rng());
      ModelParams p{n, 1.7, 1.0, 0.0, std::numbers::pi};
      const auto h = build_hamiltonian(p, sector, basis);
      const auto m = h.dense();
      CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
      for (const Hop& hop : h.hops) {
        const auto a = basis[hop.a];
        const auto b = basis[hop.b];
        CHECK(std::popcount(a.bits() ^ b.bits()) == 2);
        CHECK(a.exchanged(hop.bond) == b);
        CHECK(a.antialigned(hop.bond));
      }
      // integer towers: differences are even multiples of J (in units of J/2: multiples of 4)
      REQUIRE(h.diag_units.has_value());
      const auto& u = *h.diag_units;
      for (std::size_t i = 0; i < u.size(); ++i) {
        CHECK((u[i] - u[0]) % 4 == 0);
        CHECK(h.diag[static_cast<Eigen::Index>(i)] == 0.5 * p.J * static_cast<double>(u[i]));
      }
      const double width = h.diag.maxCoeff() - h.diag.minCoeff();
      CHECK(width <= p.J * n * n * n);
    }
  }
}

TEST_CASE("dimension mismatch is a configuration error") {
  const HalfFillingBasis basis(6);
  ModelParams p{4, 1.0, 1.0, 0.0, std::numbers::pi};
  CHECK_THROWS_AS(build_hamiltonian(p, make_sector({0, 0, 0, 0}), basis), ConfigError);
  ModelParams bad{6, 1.0, -1.0, 0.0, std::numbers::pi};
  CHECK_THROWS_AS(build_hamiltonian(bad, make_sector({0, 0, 0, 0, 0, 0}), basis), ConfigError);
}

TEST_CASE("XXZ comparison model") {
  const HalfFillingBasis basis(8);
  XXZParams clean{8, 1.0, 1.0, 0.0, DisorderKind::uniform};
  const auto h0 = build_xxz(clean, 1, basis);
  for (double f : h0.xxz_fields) CHECK(f == 0.0);
  // translation invariance of the diagonal: reversal and shift give equal energies
  const auto a = basis.index_of(SpinConfig::from_string("11110000"));
  const auto b = basis.index_of(SpinConfig::from_string("00001111"));
  CHECK(h0.diag[static_cast<Eigen::Index>(a)] == h0.diag[static_cast<Eigen::Index>(b)]);

  XXZParams discrete{8, 1.0, 1.0, 20.0, DisorderKind::discrete};
  for (std::uint64_t s = 0; s < 50; ++s) {
    for (double f : draw_xxz_fields(discrete, s)) CHECK((f == -20.0 || f == 0.0 || f == 20.0));
  }

  XXZParams uniform{10000, 1.0, 1.0, 20.0, DisorderKind::uniform};
  const auto fields = draw_xxz_fields(uniform, 9);
  double sum = 0.0;
  for (double f : fields) {
    CHECK(std::abs(f) <= 20.0);
    sum += f;
  }
  CHECK(std::abs(sum / 10000.0) < 0.5);

  // diagonal from the defining sum
  const auto h = build_xxz(XXZParams{8, 0.8, 1.3, 2.0, DisorderKind::uniform}, 4, basis);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    double e = 0.0;
    for (int j = 1; j < 8; ++j) e += 0.65 * basis[i].sz(j) * basis[i].sz(j + 1);
    for (int j = 1; j <= 8; ++j) e += h.xxz_fields[static_cast<std::size_t>(j - 1)] * basis[i].sz(j);
    CHECK(h.diag[static_cast<Eigen::Index>(i)] == doctest::Approx(e).epsilon(1e-13));
  }
}

TEST_CASE("staggered magnetization") {
  const HalfFillingBasis basis(4);
  Eigen::VectorXd vac = Eigen::VectorXd::Zero(6);
  vac[static_cast<Eigen::Index>(basis.index_of(vacuum_config(4)))] = 1.0;
  CHECK(staggered_magnetization(vac, basis) == -1.0);

  Eigen::VectorXd sup = Eigen::VectorXd::Zero(6);
  sup[static_cast<Eigen::Index>(basis.index_of(SpinConfig::from_string("1010")))] = std::sqrt(0.5);
  sup[static_cast<Eigen::Index>(basis.index_of(SpinConfig::from_string("0101")))] = std::sqrt(0.5);
  CHECK(staggered_magnetization(sup, basis) == doctest::Approx(0.0));

  const HalfFillingBasis b8(8);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Eigen::VectorXcd psi(static_cast<Eigen::Index>(b8.size()));
  for (auto& c : psi) c = {g(rng), g(rng)};
  psi.normalize();
  double brute = 0.0;
  for (std::size_t i = 0; i < b8.size(); ++i) {
    double mu = 0.0;
    for (int j = 1; j <= 8; ++j) mu += std::pow(-1.0, j) * b8[i].sz(j) / 8.0;
    brute += std::norm(psi[static_cast<Eigen::Index>(i)]) * mu;
  }
  CHECK(staggered_magnetization(psi, b8) == doctest::Approx(brute).epsilon(1e-13));
}
