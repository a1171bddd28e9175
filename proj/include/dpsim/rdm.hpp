#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "dpsim/combinat.hpp"
#include "dpsim/ensemble.hpp"
#include "dpsim/errors.hpp"

namespace dpsim {

/// Block-diagonal reduced density matrix of block A: gblocks[k] = Q_k Q_k^T acts
/// on the weight-k strings of the block, ordered by weight_rank.
struct BlockRDM {
  SystemShape shape;
  std::vector<Eigen::MatrixXd> gblocks;

  double trace() const;
};

BlockRDM build_blocks(const DefiniteParticleState& state);

/// Draws the G_k directly from their Wishart laws (Bartlett factors when
/// C(N-m, l-k) > C(m, k), raw Gaussian Q_k otherwise) and normalizes the total
/// trace. Same distribution as build_blocks(sample_state(...)) at O(C(m,k)^2)
/// cost per block instead of O(C(m,k) C(N-m,l-k)); the streams differ.
BlockRDM sample_block_rdm(const SystemShape& shape, SeedSpec seed);

/// Embeds the weight classes into the 2^m computational basis.
Eigen::MatrixXd assemble_dense(const BlockRDM& blocks);

/// Partial transpose over the block qubits selected by `subset`:
/// <i|rho^T|j> = <i'|rho|j'> with the subset bits of i and j exchanged.
template <typename Derived>
typename Derived::PlainObject partial_transpose(const Eigen::MatrixBase<Derived>& rho, Mask subset) {
  const Eigen::Index dim = rho.rows();
  if (rho.cols() != dim || dim < 2 || (dim & (dim - 1)) != 0)
    throw InvalidArgument("partial_transpose: matrix must be square with power-of-two dimension");
  const Mask full = static_cast<Mask>(dim - 1);
  if (subset == 0 || (subset & full) == full || (subset & ~full) != 0)
    throw InvalidArgument("partial_transpose: subset must be a nonempty proper subset of the qubits");

  typename Derived::PlainObject out(dim, dim);
  const Mask keep = full & ~subset;
  for (Eigen::Index j = 0; j < dim; ++j) {
    const auto jm = static_cast<Mask>(j);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const auto im = static_cast<Mask>(i);
      const Mask ip = (im & keep) | (jm & subset);
      const Mask jp = (jm & keep) | (im & subset);
      out(i, j) = rho(ip, jp);
    }
  }
  return out;
}

/// Ascending eigenvalues of a real symmetric matrix with its trace.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  double trace = 0.0;

  Eigen::Index size() const { return eigenvalues.size(); }
  double min() const { return eigenvalues.size() ? eigenvalues(0) : 0.0; }
  double max() const { return eigenvalues.size() ? eigenvalues(eigenvalues.size() - 1) : 0.0; }
  /// Eigenvalues strictly below -tol.
  Eigen::Index count_negative(double tol = 1e-12) const;
  /// Eigenvalues with |lambda| < tol.
  Eigen::Index count_zero(double tol = 1e-12) const;
};

/// Zero-eigenvalue classification threshold.
inline constexpr double kZeroEigenvalueTol = 1e-12;

/// Throws InvalidArgument if the matrix is not symmetric to 1e-12 (relative to
/// its largest entry).
Spectrum spectrum(const Eigen::MatrixXd& matrix);

/// Eigenvalues of rho_A from the blocks, padded with the structural zeros of
/// weight classes that carry no block.
Spectrum block_spectrum(const BlockRDM& blocks);

/// One eigenvalue per line at 17 significant digits after the header
/// "# N=<N> l=<l> m=<m> subset=<mask> sample_seed=<master>:<index>".
void write_spectrum(std::ostream& os, const Spectrum& spec, const SystemShape& shape, Mask subset,
                    SeedSpec seed);

}  // namespace dpsim
