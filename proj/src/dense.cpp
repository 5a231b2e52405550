#include "spdsd/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "spdsd/error.hpp"

namespace spdsd {

namespace {


template <typename Serial, typename Parallel>
decltype(auto) dispatch(const Exec& ex, Serial&& s, Parallel&& p) {
  if (ex.backend == Backend::parallel) return p();
  return s();
}

double apply_scalar(double x, MatFn fn, double power) {
  switch (fn) {
    case MatFn::exp: return std::exp(x);
    case MatFn::log: return std::log(x);
    case MatFn::sqrt: return std::sqrt(x);
    case MatFn::inv: return 1.0 / x;
    case MatFn::inv_sqrt: return 1.0 / std::sqrt(x);
    case MatFn::power: return std::pow(x, power);
  }
  return x;
}

bool needs_positive(MatFn fn, double power) {
  switch (fn) {
    case MatFn::log:
    case MatFn::sqrt:
    case MatFn::inv:
    case MatFn::inv_sqrt:
      return true;
    case MatFn::power:
      return power != std::floor(power) || power < 0.0;
    case MatFn::exp:
      return false;
  }
  return false;
}

}  // namespace

std::uint64_t cube_over(std::uint64_t n, std::uint64_t d) { return (n * n * n + d - 1) / d; }

LowerTriangular cholesky(const SymMatrix& a, const Exec& ex) {
  const Matrix& m = a.matrix();
  Matrix l = dispatch(
      ex, [&] { return kernels::serial::cholesky(m); }, [&] { return kernels::omp::cholesky(m); });
  ex.charge(cube_over(a.n(), 3));
  return LowerTriangular(std::move(l));
}

Matrix tri_solve_lower(const LowerTriangular& l, const Matrix& rhs, SolveSide side, const Exec& ex) {
  if (l.n() != rhs.n()) throw DimensionMismatch("tri_solve_lower: dimension mismatch");
  for (std::size_t i = 0; i < l.n(); ++i)
    if (l(i, i) == 0.0) throw SingularFactor("tri_solve_lower: zero diagonal at " + std::to_string(i));
  const Matrix& lm = l.matrix();
  Matrix x;
  if (side == SolveSide::left) {
    x = dispatch(
        ex, [&] { return kernels::serial::trsm_left(lm, rhs); },
        [&] { return kernels::omp::trsm_left(lm, rhs); });
  } else {
    x = dispatch(
        ex, [&] { return kernels::serial::trsm_right_transposed(lm, rhs); },
        [&] { return kernels::omp::trsm_right_transposed(lm, rhs); });
  }
  ex.charge(cube_over(l.n(), 2));
  return x;
}

EigenDecomposition sym_eig(const SymMatrix& a, const Exec& ex, int max_sweeps, double tol) {
  const std::size_t n = a.n();
  Matrix d = a.matrix();
  Matrix u = Matrix::identity(n);
  const kernels::JacobiStats st = dispatch(
      ex, [&] { return kernels::serial::jacobi(d, u, max_sweeps, tol); },
      [&] { return kernels::omp::jacobi(d, u, max_sweeps, tol); });
  ex.charge(12 * static_cast<std::uint64_t>(n) * st.rotations +
            static_cast<std::uint64_t>(n) * n * (st.sweeps + 1));
  if (!st.converged)
    throw NoConvergence("sym_eig: no convergence after " + std::to_string(st.sweeps) + " sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d(x, x) < d(y, y); });
  EigenDecomposition e{std::vector<double>(n), Matrix(n)};
  for (std::size_t k = 0; k < n; ++k) {
    e.values[k] = d(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) e.vectors(r, k) = u(r, order[k]);
  }
  return e;
}

SymMatrix apply_matfn(const EigenDecomposition& e, MatFn fn, const Exec& ex, double power) {
  const std::size_t n = e.values.size();
  if (needs_positive(fn, power) && n > 0 && !(e.values.front() > 0.0))
    throw DomainError("sym_matfn: eigenvalue " + std::to_string(e.values.front()) +
                      " outside the function's domain");
  std::vector<double> f(n);
  for (std::size_t k = 0; k < n; ++k) f[k] = apply_scalar(e.values[k], fn, power);
  Matrix r = dispatch(
      ex, [&] { return kernels::serial::scaled_outer(e.vectors, f); },
      [&] { return kernels::omp::scaled_outer(e.vectors, f); });
  const std::uint64_t un = n;
  ex.charge(un + un * un + un * un * (un + 1) / 2);
  SymMatrix s(n);
  s.raw() = std::move(r);
  return s;
}

SymMatrix sym_matfn(const SymMatrix& a, MatFn fn, const Exec& ex, double power) {
  return apply_matfn(sym_eig(a, ex), fn, ex, power);
}

Matrix multiply(const Matrix& a, const Matrix& b, const Exec& ex) {
  Matrix c = dispatch(
      ex, [&] { return kernels::serial::gemm(a, false, b, false); },
      [&] { return kernels::omp::gemm(a, false, b, false); });
  ex.charge(cube_over(a.n(), 1));
  return c;
}

Matrix multiply_at_b(const Matrix& a, const Matrix& b, const Exec& ex) {
  Matrix c = dispatch(
      ex, [&] { return kernels::serial::gemm(a, true, b, false); },
      [&] { return kernels::omp::gemm(a, true, b, false); });
  ex.charge(cube_over(a.n(), 1));
  return c;
}

Matrix multiply_a_bt(const Matrix& a, const Matrix& b, const Exec& ex) {
  Matrix c = dispatch(
      ex, [&] { return kernels::serial::gemm(a, false, b, true); },
      [&] { return kernels::omp::gemm(a, false, b, true); });
  ex.charge(cube_over(a.n(), 1));
  return c;
}

Matrix tri_multiply(const LowerTriangular& l, bool trans, const Matrix& m, kernels::Side side,
                    const Exec& ex) {
  const Matrix& lm = l.matrix();
  Matrix c = dispatch(
      ex, [&] { return kernels::serial::trmm(lm, trans, m, side); },
      [&] { return kernels::omp::trmm(lm, trans, m, side); });
  ex.charge(cube_over(l.n(), 2));
  return c;
}

SymMatrix congruence(const LowerTriangular& b, const SymMatrix& s, const Exec& ex) {
  const Matrix bs = tri_multiply(b, false, s.matrix(), kernels::Side::left, ex);
  return SymMatrix::symmetrize(tri_multiply(b, true, bs, kernels::Side::right, ex));
}

SymMatrix inverse_congruence(const LowerTriangular& b, const SymMatrix& s, const Exec& ex) {
  const Matrix x = tri_solve_lower(b, s.matrix(), SolveSide::left, ex);
  return SymMatrix::symmetrize(tri_solve_lower(b, x, SolveSide::right_transposed, ex));
}

double log_diag_sum(const LowerTriangular& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < b.n(); ++i) s += std::log(b(i, i));
  return s;
}

}  // namespace spdsd
