#pragma once

// Low-level dense and block-sparse kernels. Each kernel exists twice: a
// plain serial reference in `kernels::serial` and an OpenMP version in
// `kernels::omp`. Kernels do not charge the flop ledger; the dense-linalg
// and objective layers charge analytic counts around them.
//
// Except for the Jacobi eigensolver, both versions evaluate every output
// entry with the same operation order, so results are bitwise identical.

#include <cstddef>
#include <span>

#include "spdsd/matrix.hpp"

namespace spdsd {

enum class Backend { serial, parallel };

/// True if the library was built with OpenMP.
bool openmp_enabled();
/// Backend used when callers do not pick one.
Backend default_backend();

namespace kernels {

enum class Side { left, right };

// A 2x2 (or 1x1 when p == q) block of an otherwise-identity matrix T acting
// on coordinates p <= q. Blocks in one call must touch disjoint coordinates.
struct Block {
  std::size_t p = 0;
  std::size_t q = 0;
  double pp = 1.0;  // T(p,p)
  double pq = 0.0;  // T(p,q)
  double qp = 0.0;  // T(q,p)
  double qq = 1.0;  // T(q,q)
};

struct JacobiStats {
  int sweeps = 0;
  std::size_t rotations = 0;
  bool converged = false;
};

namespace serial {
// Lower Cholesky factor of SPD a; throws NotPositiveDefinite on a pivot <= 0.
Matrix cholesky(const Matrix& a);
// op(a) * op(b)
Matrix gemm(const Matrix& a, bool trans_a, const Matrix& b, bool trans_b);
// side left: op(l) * m; side right: m * op(l). l is lower triangular.
Matrix trmm(const Matrix& l, bool trans_l, const Matrix& m, Side side);
// Solves l * x = rhs.
Matrix trsm_left(const Matrix& l, const Matrix& rhs);
// Solves x * l^T = rhs.
Matrix trsm_right_transposed(const Matrix& l, const Matrix& rhs);
// Diagonalises symmetric a in place; u accumulates the rotations and must
// start as the identity.
JacobiStats jacobi(Matrix& a, Matrix& u, int max_sweeps, double tol);
// u * diag(d) * u^T
Matrix scaled_outer(const Matrix& u, std::span<const double> d);
// m <- T^T m T for symmetric m; symmetry is kept exact.
void congruence(Matrix& m, std::span<const Block> blocks);
// b <- b * T
void right_multiply(Matrix& b, std::span<const Block> blocks);
// sum_k w_k * mats_k + shift * I
Matrix combine(std::span<const Matrix* const> mats, std::span<const double> weights, double shift);
}  // namespace serial

// Same contracts as the serial kernels.
namespace omp {
Matrix cholesky(const Matrix& a);
Matrix gemm(const Matrix& a, bool trans_a, const Matrix& b, bool trans_b);
Matrix trmm(const Matrix& l, bool trans_l, const Matrix& m, Side side);
Matrix trsm_left(const Matrix& l, const Matrix& rhs);
Matrix trsm_right_transposed(const Matrix& l, const Matrix& rhs);
JacobiStats jacobi(Matrix& a, Matrix& u, int max_sweeps, double tol);
Matrix scaled_outer(const Matrix& u, std::span<const double> d);
void congruence(Matrix& m, std::span<const Block> blocks);
void right_multiply(Matrix& b, std::span<const Block> blocks);
Matrix combine(std::span<const Matrix* const> mats, std::span<const double> weights, double shift);
}  // namespace omp

}  // namespace kernels
}  // namespace spdsd
