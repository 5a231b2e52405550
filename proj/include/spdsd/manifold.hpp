#pragma once

// Geometry of the SPD cone under the affine-invariant metric
// <xi, eta>_X = tr(X^-1 xi X^-1 eta). Points are carried as Cholesky factors.

#include "spdsd/dense.hpp"
#include "spdsd/matrix.hpp"

namespace spdsd {

/// An SPD matrix X held as its Cholesky factor B (X = B B^T).
class CholeskyPoint {
 public:
  CholeskyPoint() = default;
  /// Throws NotPositiveDefinite unless b has a strictly positive, finite diagonal
  /// and finite entries.
  explicit CholeskyPoint(LowerTriangular b);

  static CholeskyPoint identity(std::size_t n) { return CholeskyPoint(LowerTriangular::identity(n)); }
  static CholeskyPoint from_spd(const SymMatrix& x, const Exec& ex = {});

  std::size_t n() const { return b_.n(); }
  const LowerTriangular& factor() const { return b_; }
  // For in-place sparse updates; the caller keeps the diagonal positive.
  LowerTriangular& mutable_factor() { return b_; }

  /// X = B B^T.
  SymMatrix matrix(const Exec& ex = {}) const;
  /// log det X = 2 sum log B_ii.
  double log_det() const { return 2.0 * log_diag_sum(b_); }

 private:
  LowerTriangular b_;
};

/// tr(X^-1 xi X^-1 eta), evaluated as the entrywise product of B^-1 xi B^-T and B^-1 eta B^-T.
double inner(const CholeskyPoint& at, const SymMatrix& xi, const SymMatrix& eta, const Exec& ex = {});

/// Cholesky factor of B exp(t B^-1 xi B^-T) B^T. Throws Overflow when an
/// eigenvalue of t B^-1 xi B^-T exceeds 700 in magnitude.
CholeskyPoint exp_map(const CholeskyPoint& at, const SymMatrix& xi, double t, const Exec& ex = {});

/// exp_map with the tangent vector already in frame coordinates,
/// W = B^-1 xi B^-T.
CholeskyPoint exp_map_relative(const CholeskyPoint& at, const SymMatrix& w, double t, const Exec& ex = {});

/// B log(B^-1 Y B^-T) B^T, the inverse of exp_map at t = 1.
SymMatrix log_map(const CholeskyPoint& at, const CholeskyPoint& y, const Exec& ex = {});

/// X G X.
SymMatrix riemannian_grad(const CholeskyPoint& at, const SymMatrix& euclid_grad, const Exec& ex = {});

/// ||log(X^-1/2 Y X^-1/2)||_F, computed from the eigenvalues of B^-1 Y B^-T,
/// which share the spectrum of X^-1/2 Y X^-1/2.
double distance(const CholeskyPoint& x, const CholeskyPoint& y, const Exec& ex = {});

inline constexpr double kExpEigenCap = 700.0;

}  // namespace spdsd
