#include "schwinger/dpt.hpp"

#include <algorithm>
#include <cmath>

namespace schwinger {

std::size_t TowerBlocks::tower_of_label(std::int64_t label) const {
  const auto it = std::lower_bound(labels.begin(), labels.end(), label);
  if (it == labels.end() || *it != label) throw ConfigError("no tower with label " + std::to_string(label));
  return static_cast<std::size_t>(it - labels.begin());
}

SparseMatrix TowerBlocks::block(std::size_t from, std::size_t to) const {
  const auto it = blocks.find({from, to});
  if (it != blocks.end()) return it->second;
  return SparseMatrix(static_cast<Eigen::Index>(states[to].size()), static_cast<Eigen::Index>(states[from].size()));
}

TowerBlocks build_T_blocks(const SectorHamiltonian& h, const TowerIndex& towers) {
  TowerBlocks out;
  std::vector<std::size_t> tower_of(h.dimension(), 0);
  std::vector<std::size_t> local(h.dimension(), 0);
  for (const auto& [label, states] : towers) {
    const std::size_t t = out.labels.size();
    out.labels.push_back(label);
    out.states.push_back(states);
    out.energies.push_back(h.unit_energy * static_cast<double>(label));
    for (std::size_t i = 0; i < states.size(); ++i) {
      tower_of[states[i]] = t;
      local[states[i]] = i;
    }
  }
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Eigen::Triplet<double>>> triplets;
  for (const Hop& hop : h.hops) {
    const std::size_t ta = tower_of[hop.a];
    const std::size_t tb = tower_of[hop.b];
    const auto la = static_cast<Eigen::Index>(local[hop.a]);
    const auto lb = static_cast<Eigen::Index>(local[hop.b]);
    triplets[{ta, tb}].emplace_back(lb, la, hop.amplitude);
    triplets[{tb, ta}].emplace_back(la, lb, hop.amplitude);
  }
  for (auto& [key, trip] : triplets) {
    SparseMatrix m(static_cast<Eigen::Index>(out.states[key.second].size()),
                   static_cast<Eigen::Index>(out.states[key.first].size()));
    m.setFromTriplets(trip.begin(), trip.end());
    out.blocks.emplace(key, std::move(m));
  }
  return out;
}

EffectiveHamiltonian build_effective(const SectorHamiltonian& h, const TowerBlocks& tb, std::int64_t label, int order,
                                     Coefficients coefficients) {
  if (order < 0 || order > 3) throw ConfigError("effective Hamiltonian order must be 0..3");
  if (!(h.params.J > 0.0)) throw ConfigError("perturbation theory needs J > 0");
  const std::size_t t0 = tb.tower_of_label(label);
  const double e0 = tb.energies[t0];
  const auto d = static_cast<Eigen::Index>(tb.states[t0].size());

  EffectiveHamiltonian out;
  out.order = order;
  out.tower_label = label;
  out.states = tb.states[t0];
  out.terms.push_back(e0 * Eigen::MatrixXd::Identity(d, d));
  const Eigen::MatrixXd t00 = Eigen::MatrixXd(tb.block(t0, t0));
  if (order >= 1) out.terms.push_back(t00);

  // towers one hop away
  std::vector<std::size_t> near;
  for (const auto& [key, m] : tb.blocks) {
    if (key.first == t0 && key.second != t0 && m.nonZeros() > 0) near.push_back(key.second);
  }
  std::vector<double> denom;  // E_0 - E_a
  for (std::size_t a : near) {
    const double gap = e0 - tb.energies[a];
    if (gap == 0.0) throw ConfigError("zero energy denominator between towers");
    denom.push_back(gap);
    out.energy_denominators.push_back(-gap / h.params.J);
  }
  const bool printed = coefficients == Coefficients::as_printed;

  if (order >= 2) {
    Eigen::MatrixXd h2 = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < near.size(); ++i) {
      const SparseMatrix v = tb.block(t0, near[i]);
      const Eigen::MatrixXd vtv = Eigen::MatrixXd(SparseMatrix(v.transpose()) * v);
      h2 += (printed ? -1.0 : 1.0) * vtv / denom[i];
    }
    out.terms.push_back(h2);
  }
  if (order >= 3) {
    Eigen::MatrixXd h3 = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < near.size(); ++i) {
      const SparseMatrix va = tb.block(t0, near[i]);
      const Eigen::MatrixXd vtv = Eigen::MatrixXd(SparseMatrix(va.transpose()) * va);
      h3 -= 0.5 * (t00 * vtv + vtv * t00) / (denom[i] * denom[i]);
      for (std::size_t j = 0; j < near.size(); ++j) {
        const SparseMatrix tab = tb.block(near[i], near[j]);
        if (tab.nonZeros() == 0) continue;
        const SparseMatrix vb = tb.block(t0, near[j]);
        const Eigen::MatrixXd path = Eigen::MatrixXd(SparseMatrix(vb.transpose()) * (tab * va));
        const double factor = (printed && i != j) ? 3.0 : 1.0;
        h3 += factor * path / (denom[i] * denom[j]);
      }
    }
    out.hermiticity_residual = (h3 - h3.transpose()).cwiseAbs().maxCoeff();
    out.terms.push_back(0.5 * (h3 + h3.transpose()));
  }
  out.matrix = Eigen::MatrixXd::Zero(d, d);
  for (const auto& t : out.terms) out.matrix += t;
  return out;
}

Eigen::MatrixXcd evolve_dpt(const EffectiveHamiltonian& heff, const Eigen::VectorXcd& initial,
                            const std::vector<double>& times) {
  if (initial.size() != heff.matrix.rows()) throw ConfigError("initial state is not a tower vector");
  const SpectralDecomposition spec = diagonalize(heff.matrix, true);
  const PhaseEvolver ev(spec, initial);
  return ev.states(times);
}

Eigen::MatrixXcd evolve_dpt_infinite(const SpectralDecomposition& spec, const std::vector<std::uint32_t>& tower,
                                     const Eigen::VectorXcd& initial, const std::vector<double>& times) {
  if (!spec.has_vectors()) throw ConfigError("projected evolution needs eigenvectors");
  const PhaseEvolver ev(spec, initial);
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(tower.size()), spec.vectors.cols());
  for (std::size_t i = 0; i < tower.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = spec.vectors.row(tower[i]);
  Eigen::MatrixXd re(spec.vectors.cols(), static_cast<Eigen::Index>(times.size()));
  Eigen::MatrixXd im(spec.vectors.cols(), static_cast<Eigen::Index>(times.size()));
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Eigen::VectorXcd a = ev.amplitudes(times[k]);
    re.col(static_cast<Eigen::Index>(k)) = a.real();
    im.col(static_cast<Eigen::Index>(k)) = a.imag();
  }
  Eigen::MatrixXcd out(rows.rows(), re.cols());
  out.real() = rows * re;
  out.imag() = rows * im;
  return out;
}

Eigen::VectorXcd embed(const std::vector<std::uint32_t>& tower, std::size_t dimension, const Eigen::VectorXcd& v) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dimension));
  for (std::size_t i = 0; i < tower.size(); ++i) out[tower[i]] = v[static_cast<Eigen::Index>(i)];
  return out;
}

Eigen::VectorXcd restrict_to(const std::vector<std::uint32_t>& tower, const Eigen::VectorXcd& v) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(tower.size()));
  for (std::size_t i = 0; i < tower.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[tower[i]];
  return out;
}

}  // namespace schwinger
