#pragma once

// Canonical tangent basis and the sparse Cholesky update factors built on it.
//
// E_ij (j <= i) is the symmetric matrix with 1/sqrt(2) at (i,j) and (j,i)
// when i != j, or a single 1 at (i,i). At X = B B^T the orthonormal basis is
// G_ij = B E_ij B^T. Indices are 0-based throughout the library.

#include <cstdint>
#include <span>
#include <vector>

#include "spdsd/dense.hpp"
#include "spdsd/kernels.hpp"
#include "spdsd/manifold.hpp"
#include "spdsd/rng.hpp"

namespace spdsd {

struct BasisIndex {
  std::size_t i = 0;
  std::size_t j = 0;  // j <= i

  bool diagonal() const { return i == j; }
  friend bool operator==(const BasisIndex&, const BasisIndex&) = default;
};

struct Direction {
  BasisIndex index;
  double beta = 0.0;
};

/// Throws OverlappingDirections if two indices share a coordinate, and
/// DimensionMismatch if an index is out of range or has j > i.
void check_non_overlapping(std::size_t n, std::span<const BasisIndex> indices);

/// Non-empty set of pairwise non-overlapping directions.
class DirectionSet {
 public:
  DirectionSet(std::size_t n, std::vector<Direction> entries);
  DirectionSet(std::size_t n, std::span<const BasisIndex> indices, std::span<const double> betas);

  std::size_t n() const { return n_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<Direction>& entries() const { return entries_; }

 private:
  std::size_t n_;
  std::vector<Direction> entries_;
};

/// Identity except on a few disjoint 2x2 / 1x1 blocks; lower triangular with
/// positive diagonal. For a block on (j, i), j < i, the block is
/// [[f_jj, 0], [f_ij, f_ii]] with f_jj * f_ii = 1.
class UpdateFactor {
 public:
  UpdateFactor(std::size_t n, std::vector<kernels::Block> blocks) : n_(n), blocks_(std::move(blocks)) {}

  static UpdateFactor identity(std::size_t n) { return UpdateFactor(n, {}); }
  /// Recovers the block form. Throws StructureViolation unless f is the
  /// identity outside disjoint (j, i) blocks of the shape above.
  static UpdateFactor from_dense(const LowerTriangular& f);

  std::size_t n() const { return n_; }
  std::span<const kernels::Block> blocks() const { return blocks_; }
  LowerTriangular dense() const;
  /// sum of log f_kk.
  double log_det() const;

 private:
  std::size_t n_;
  std::vector<kernels::Block> blocks_;
};

inline constexpr double kThetaCap = 700.0 * 1.4142135623730951;

/// sqrt(2) * f_entry off the diagonal, f_entry on it.
double beta_from_F(double f_entry, std::size_t i, std::size_t j);

/// L(exp(-theta E_ij)). Throws Overflow when |theta| exceeds kThetaCap.
UpdateFactor update_factor_uni(std::size_t n, BasisIndex idx, double theta);

/// L(exp(-alpha sum beta E_ij)) for non-overlapping directions.
UpdateFactor update_factor_multi(const DirectionSet& dirs, double alpha);

/// Inverse via the structure: 1/f on the diagonal, -f off it. Throws
/// StructureViolation when a 2x2 block does not have unit determinant.
UpdateFactor invert_update_factor(const UpdateFactor& f);
UpdateFactor invert_update_factor(const LowerTriangular& f);

/// B <- B f. Only the touched columns change. Charges 4(n - j) per
/// off-diagonal block and (n - j) per diagonal block.
void apply_update(CholeskyPoint& at, const UpdateFactor& f, const Exec& ex = {});

/// Packed lower triangle, row-major: entry (i, j) at i(i+1)/2 + j.
inline std::size_t packed_index(std::size_t i, std::size_t j) { return i * (i + 1) / 2 + j; }
BasisIndex unpack_index(std::size_t k);

/// Uniform over all n(n+1)/2 pairs.
BasisIndex random_basis_index(std::size_t n, Rng& rng);

/// Random permutation of {0..n-1}, paired up into floor(n/2) columns; per
/// column [k, l] emits (k,k) and (l,l) with probability 1/n, otherwise
/// (max, min). With odd n the last permuted element is dropped.
std::vector<BasisIndex> random_direction_set(std::size_t n, Rng& rng);

/// The deterministic part of random_direction_set: `draws` holds one
/// uniform [0,1) value per column.
std::vector<BasisIndex> direction_set_from_permutation(std::span<const std::size_t> perm,
                                                      std::span<const double> draws);

/// Scans the packed lower triangle by |value| descending (ties by (i, j)
/// ascending) and keeps every index whose coordinates are still free.
std::vector<BasisIndex> greedy_direction_set(std::size_t n, std::span<const double> packed_lower);

/// Comparisons charged for the greedy sort: d * ceil(log2 d).
std::uint64_t greedy_sort_cost(std::size_t n);

/// Dense E_ij.
SymMatrix basis_matrix(std::size_t n, BasisIndex idx);

}  // namespace spdsd
