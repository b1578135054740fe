#include "schwinger/entropy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace schwinger {

Bipartition::Bipartition(const HalfFillingBasis& basis, int cut)
    : num_sites_(basis.num_sites()), cut_(cut) {
  const int n = basis.num_sites();
  if (cut < 1 || cut > n - 1) {
    throw ConfigError("cut must lie between 1 and N-1, got " + std::to_string(cut));
  }
  const int half = n / 2;
  const int max_left = std::min(cut, half);
  rows_.assign(static_cast<std::size_t>(max_left + 1), 0);
  cols_.assign(static_cast<std::size_t>(max_left + 1), 0);

  // Dense labels for left and right halves, per particle number.
  const std::uint32_t left_mask = (1u << cut) - 1u;
  std::vector<int> left_label(1u << cut, -1);
  std::vector<int> right_label(1u << (n - cut), -1);
  entries_.reserve(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const std::uint32_t bits = basis[i].bits();
    const std::uint32_t left = bits & left_mask;
    const std::uint32_t right = bits >> cut;
    const int nl = std::popcount(left);
    auto& l = left_label[left];
    if (l < 0) l = rows_[static_cast<std::size_t>(nl)]++;
    auto& r = right_label[right];
    if (r < 0) r = cols_[static_cast<std::size_t>(nl)]++;
    entries_.push_back({nl, l, r});
  }
}

namespace {

double plogp(double p) { return p > 0.0 ? -p * std::log(p) : 0.0; }

template <typename Scalar>
EntropyTriple decompose(const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& state,
                        const Bipartition& cut) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (static_cast<std::size_t>(state.size()) != cut.dimension()) {
    throw ConfigError("state dimension does not match the bipartition");
  }
  std::vector<Mat> blocks;
  blocks.reserve(static_cast<std::size_t>(cut.max_left() + 1));
  for (int n = 0; n <= cut.max_left(); ++n) blocks.push_back(Mat::Zero(cut.rows(n), cut.cols(n)));
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    const auto& e = cut.entry(static_cast<std::size_t>(i));
    blocks[static_cast<std::size_t>(e.n_left)](e.row, e.col) = state[i];
  }

  EntropyTriple out;
  for (const Mat& m : blocks) {
    if (m.size() == 0) continue;
    const double p = m.squaredNorm();
    if (p <= 0.0) continue;
    // spectrum of rho_A(n) * p from the smaller Gram matrix
    Mat gram = (m.rows() <= m.cols()) ? Mat(m * m.adjoint()) : Mat(m.adjoint() * m);
    Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
    double s_block = 0.0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      const double lambda = std::max(0.0, es.eigenvalues()[k]);
      out.S_E += plogp(lambda);
      s_block += plogp(lambda / p);
    }
    out.S_N += plogp(p);
    out.S_C += p * s_block;
  }
  return out;
}

}  // namespace

EntropyTriple entropy_decomposition(const Eigen::Ref<const Eigen::VectorXcd>& state,
                                    const Bipartition& cut) {
  return decompose<std::complex<double>>(state, cut);
}

EntropyTriple entropy_decomposition(const Eigen::Ref<const Eigen::VectorXd>& state,
                                    const Bipartition& cut) {
  return decompose<double>(state, cut);
}

EntropyTriple entropy_decomposition(const Eigen::Ref<const Eigen::VectorXcd>& state,
                                    const HalfFillingBasis& basis, int cut) {
  return entropy_decomposition(state, Bipartition(basis, cut));
}

}  // namespace schwinger
