#pragma once

// Dense linear algebra on top of the kernels. Every call charges its
// analytic multiply-accumulate count to the ledger in `Exec`, if any:
//   cholesky                 ceil(n^3 / 3)
//   triangular solve         ceil(n^3 / 2) per side
//   triangular multiply      ceil(n^3 / 2)
//   general multiply         n^3
//   sym_eig                  12n per Jacobi rotation + n^2 per convergence check
//   sym_matfn                sym_eig + n + n^2 + n^2(n+1)/2

#include <cstdint>
#include <vector>

#include "spdsd/flops.hpp"
#include "spdsd/kernels.hpp"
#include "spdsd/matrix.hpp"

namespace spdsd {

/// Backend choice and the ledger to charge.
struct Exec {
  Backend backend = default_backend();
  FlopLedger* ledger = nullptr;

  void charge(std::uint64_t flops) const {
    if (ledger) ledger->add(flops);
  }
};

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  Matrix vectors;              // orthogonal, column k pairs with values[k]
};

enum class MatFn { exp, log, sqrt, inv, inv_sqrt, power };

enum class SolveSide { left, right_transposed };

LowerTriangular cholesky(const SymMatrix& a, const Exec& ex = {});

/// left: l * x = rhs; right_transposed: x * l^T = rhs.
Matrix tri_solve_lower(const LowerTriangular& l, const Matrix& rhs, SolveSide side, const Exec& ex = {});

/// Sweeps stop once the off-diagonal norm is below tol * ||a||_F.
inline constexpr double kJacobiTol = 1e-12;

/// Jacobi eigendecomposition. Throws NoConvergence after `max_sweeps`.
EigenDecomposition sym_eig(const SymMatrix& a, const Exec& ex = {}, int max_sweeps = 30, double tol = kJacobiTol);

/// U fn(diag) U^T. `power` is the exponent for MatFn::power.
SymMatrix sym_matfn(const SymMatrix& a, MatFn fn, const Exec& ex = {}, double power = 1.0);

/// Applies fn to an existing decomposition.
SymMatrix apply_matfn(const EigenDecomposition& e, MatFn fn, const Exec& ex = {}, double power = 1.0);

Matrix multiply(const Matrix& a, const Matrix& b, const Exec& ex = {});
Matrix multiply_at_b(const Matrix& a, const Matrix& b, const Exec& ex = {});
Matrix multiply_a_bt(const Matrix& a, const Matrix& b, const Exec& ex = {});

/// l * m (left) or m * l (right), optionally with l transposed.
Matrix tri_multiply(const LowerTriangular& l, bool trans, const Matrix& m, kernels::Side side,
                    const Exec& ex = {});

/// B S B^T, symmetrised.
SymMatrix congruence(const LowerTriangular& b, const SymMatrix& s, const Exec& ex = {});
/// B^-1 S B^-T, symmetrised.
SymMatrix inverse_congruence(const LowerTriangular& b, const SymMatrix& s, const Exec& ex = {});

/// Sum of log of the diagonal: half of log det(B B^T).
double log_diag_sum(const LowerTriangular& b);

std::uint64_t cube_over(std::uint64_t n, std::uint64_t d);

}  // namespace spdsd
