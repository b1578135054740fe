#pragma once

#include <vector>

#include <Eigen/Dense>

#include "schwinger/basis.hpp"

namespace schwinger {

/// Bipartite entropies of a pure state; S_E = S_N + S_C.
struct EntropyTriple {
  double S_E = 0.0;
  double S_N = 0.0;
  double S_C = 0.0;
};

/// Precomputed reshaping of half-filling basis states into the number-
/// resolved blocks of a left/right bipartition. The left block holds sites
/// 1..cut.
class Bipartition {
 public:
  Bipartition(const HalfFillingBasis& basis, int cut);

  int cut() const { return cut_; }
  int num_sites() const { return num_sites_; }
  std::size_t dimension() const { return entries_.size(); }

  struct Entry {
    int n_left;
    int row;
    int col;
  };
  const Entry& entry(std::size_t basis_index) const { return entries_[basis_index]; }

  /// Block shape (rows = left configurations with n particles,
  /// cols = right configurations with N/2 - n particles).
  int rows(int n_left) const { return rows_[static_cast<std::size_t>(n_left)]; }
  int cols(int n_left) const { return cols_[static_cast<std::size_t>(n_left)]; }
  int max_left() const { return static_cast<int>(rows_.size()) - 1; }

 private:
  int num_sites_;
  int cut_;
  std::vector<Entry> entries_;
  std::vector<int> rows_;
  std::vector<int> cols_;
};

/// Natural-log entropies of a normalized state. 0 ln 0 := 0.
EntropyTriple entropy_decomposition(const Eigen::Ref<const Eigen::VectorXcd>& state,
                                    const Bipartition& cut);
EntropyTriple entropy_decomposition(const Eigen::Ref<const Eigen::VectorXd>& state,
                                    const Bipartition& cut);

/// Convenience overload building the bipartition on the fly.
EntropyTriple entropy_decomposition(const Eigen::Ref<const Eigen::VectorXcd>& state,
                                    const HalfFillingBasis& basis, int cut);

}  // namespace schwinger
